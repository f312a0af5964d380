//! Entity-based gating: drop articles whose keyword mentions never refer to
//! an organization or company.
//!
//! Sentences are extracted with a deterministic rule-based splitter
//! (terminal punctuation plus a German/English abbreviation list). The gate
//! keeps an article iff at least one keyword occurrence overlaps an entity
//! span whose label is in the configured organization label set.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Article, KeywordMatch};
use crate::error::{Error, Result};
use crate::providers::NerProvider;

/// Abbreviations whose trailing period never ends a sentence.
const ABBREVIATIONS: &[&str] = &[
    "z.B", "z. B", "bzw", "ca", "d.h", "u.a", "Nr", "Dr", "Prof", "Hr", "Fr", "St", "Mio", "Mrd",
    "Mr", "Mrs", "Ms", "e.g", "i.e", "etc", "Inc", "Co", "Corp", "Ltd", "U.S", "vs",
];

/// A sentence containing at least one keyword occurrence. Offsets are byte
/// offsets; `keywords` carries per-occurrence spans relative to the
/// sentence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KeywordSentence {
    pub paragraph_index: usize,
    pub start: usize,
    pub end: usize,
    pub text: String,
    pub keywords: Vec<(String, usize, usize)>,
}

/// Split one paragraph into sentence byte ranges. `protected` spans (the
/// keyword matches) are never split.
fn split_sentences(paragraph: &str, protected: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let chars: Vec<(usize, char)> = paragraph.char_indices().collect();
    let mut boundaries = Vec::new();
    for (i, &(pos, c)) in chars.iter().enumerate() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        // Collapse runs of terminal punctuation to the last one.
        if let Some(&(_, next)) = chars.get(i + 1) {
            if matches!(next, '.' | '!' | '?') {
                continue;
            }
            if !next.is_whitespace() {
                continue;
            }
        }
        if c == '.' {
            // Token immediately before the period.
            let mut j = i;
            while j > 0 && !chars[j - 1].1.is_whitespace() {
                j -= 1;
            }
            let token = &paragraph[chars[j].0..pos];
            if ABBREVIATIONS.iter().any(|a| token == *a || token.ends_with(&format!(".{a}"))) {
                continue;
            }
            // Single initials like "J." or digits like "3." do not split.
            if token.chars().count() == 1 {
                continue;
            }
        }
        // Boundary is after the punctuation char.
        let after = pos + c.len_utf8();
        if after >= paragraph.len() {
            continue;
        }
        // Never split inside a protected span.
        if protected.iter().any(|&(s, e)| after > s && after < e) {
            continue;
        }
        boundaries.push(after);
    }

    let mut ranges = Vec::new();
    let mut start = 0;
    for b in boundaries {
        ranges.push((start, b));
        start = b;
    }
    if start < paragraph.len() {
        ranges.push((start, paragraph.len()));
    }
    // Trim whitespace at range edges.
    ranges
        .into_iter()
        .filter_map(|(s, e)| {
            let text = &paragraph[s..e];
            let trimmed_start = s + (text.len() - text.trim_start().len());
            let trimmed_end = e - (text.len() - text.trim_end().len());
            (trimmed_start < trimmed_end).then_some((trimmed_start, trimmed_end))
        })
        .collect()
}

/// Extract the sentences that contain keyword matches. Every returned
/// sentence contains at least one match; a sentence with several matches is
/// returned once with all of them listed.
pub fn keyword_sentences(article: &Article, matches: &[KeywordMatch]) -> Vec<KeywordSentence> {
    let mut per_paragraph: BTreeMap<usize, Vec<&KeywordMatch>> = BTreeMap::new();
    for m in matches {
        per_paragraph.entry(m.paragraph_index).or_default().push(m);
    }

    let mut out = Vec::new();
    for (para_idx, para_matches) in per_paragraph {
        let Some(paragraph) = article.paragraphs.get(para_idx) else {
            continue;
        };
        let protected: Vec<(usize, usize)> =
            para_matches.iter().map(|m| (m.start, m.end)).collect();
        for (s, e) in split_sentences(paragraph, &protected) {
            let contained: Vec<(String, usize, usize)> = para_matches
                .iter()
                .filter(|m| m.start >= s && m.end <= e)
                .map(|m| (m.keyword.clone(), m.start - s, m.end - s))
                .collect();
            if contained.is_empty() {
                continue;
            }
            out.push(KeywordSentence {
                paragraph_index: para_idx,
                start: s,
                end: e,
                text: paragraph[s..e].to_string(),
                keywords: contained,
            });
        }
    }
    out
}

/// Keep/drop decision with the per-keyword labels recorded for the
/// checkpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateDecision {
    pub keep: bool,
    /// One entry per keyword occurrence: (keyword, overlapping org label if
    /// any).
    pub labels: Vec<(String, Option<String>)>,
}

/// Apply the NER provider to the keyword sentences and keep the article iff
/// at least one keyword occurrence overlaps an organization-labeled span.
/// Organization entities elsewhere in a sentence never cause a keep.
pub fn entity_gate(
    sentences: &[KeywordSentence],
    ner: &dyn NerProvider,
    org_labels: &[String],
) -> Result<GateDecision> {
    if sentences.is_empty() {
        return Err(Error::validation("entity gate called without keyword sentences"));
    }
    let mut labels = Vec::new();
    let mut keep = false;
    for sentence in sentences {
        let spans = ner.entities(&sentence.text, org_labels)?;
        for (keyword, kstart, kend) in &sentence.keywords {
            let overlapping = spans.iter().find(|span| {
                span.start < *kend && *kstart < span.end && org_labels.contains(&span.label)
            });
            let label = overlapping.map(|s| s.label.clone());
            if label.is_some() {
                keep = true;
            }
            labels.push((keyword.clone(), label));
        }
    }
    Ok(GateDecision { keep, labels })
}

/// Default organization label set.
pub fn default_org_labels() -> Vec<String> {
    vec!["organization".to_string(), "company".to_string()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{match_keywords, CompanySpec, MatchPolicy};
    use crate::providers::{EntitySpan, MockNer, NerRule};
    use chrono::TimeZone;
    use chrono::Utc;

    fn article(paragraphs: &[&str]) -> Article {
        Article {
            id: "a1".into(),
            company_id: "c1".into(),
            url: "https://news.example/a1".into(),
            title: "t".into(),
            paragraphs: paragraphs.iter().map(|s| s.to_string()).collect(),
            published_at: Utc.with_ymd_and_hms(2023, 2, 2, 0, 0, 0).unwrap(),
            language: "de".into(),
        }
    }

    fn spec(keywords: &[&str]) -> CompanySpec {
        CompanySpec {
            company_id: "c1".into(),
            display_name: "C1".into(),
            keywords: keywords.iter().map(|k| crate::corpus::Keyword::from(*k)).collect(),
            related_company_ids: vec![],
        }
    }

    #[test]
    fn only_the_keyword_sentence_is_returned() {
        let a = article(&["First sentence here. Allianz raised its dividend. Third sentence."]);
        let matches = match_keywords(&a, &spec(&["Allianz"]), MatchPolicy::default());
        let sentences = keyword_sentences(&a, &matches);
        assert_eq!(sentences.len(), 1);
        assert_eq!(sentences[0].text, "Allianz raised its dividend.");
        assert_eq!(sentences[0].keywords.len(), 1);
        let (kw, s, e) = &sentences[0].keywords[0];
        assert_eq!(kw, "Allianz");
        assert_eq!(&sentences[0].text[*s..*e], "Allianz");
    }

    #[test]
    fn abbreviations_do_not_split() {
        let a = article(&["Die Firma hat z.B. neue Ziele. Allianz stimmt zu."]);
        let matches = match_keywords(&a, &spec(&["Allianz"]), MatchPolicy::default());
        let sentences = keyword_sentences(&a, &matches);
        assert_eq!(sentences.len(), 1);
        assert_eq!(sentences[0].text, "Allianz stimmt zu.");
        // The abbreviation sentence stayed whole: splitting happened once.
        let all = split_sentences(&a.paragraphs[0], &[]);
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn sentence_boundaries_never_split_a_match() {
        // Keyword containing a period: the protected span keeps the
        // splitter from cutting through it.
        let a = article(&["Der Konzern E.ON Kraft meldet Zahlen. Mehr dazu morgen."]);
        let matches = match_keywords(&a, &spec(&["E.ON Kraft"]), MatchPolicy::default());
        assert_eq!(matches.len(), 1);
        let sentences = keyword_sentences(&a, &matches);
        assert_eq!(sentences.len(), 1);
        let (kw, s, e) = &sentences[0].keywords[0];
        assert_eq!(&sentences[0].text[*s..*e], kw);
    }

    #[test]
    fn multi_match_sentence_listed_once_with_all_keywords() {
        let a = article(&["Allianz und Siemens kooperieren eng. Andere Nachricht folgt."]);
        let matches = match_keywords(&a, &spec(&["Allianz", "Siemens"]), MatchPolicy::default());
        let sentences = keyword_sentences(&a, &matches);
        assert_eq!(sentences.len(), 1);
        assert_eq!(sentences[0].keywords.len(), 2);
        // Brute-force oracle: scan every sentence for every keyword.
        let all = split_sentences(&a.paragraphs[0], &[]);
        let mut expected = 0;
        for (s, e) in all {
            let text = &a.paragraphs[0][s..e];
            for kw in ["Allianz", "Siemens"] {
                expected += text.matches(kw).count();
            }
        }
        assert_eq!(expected, 2);
    }

    #[test]
    fn gate_keeps_on_organization_overlap() {
        let a = article(&["Allianz SE reported strong figures."]);
        let matches = match_keywords(&a, &spec(&["Allianz"]), MatchPolicy::default());
        let sentences = keyword_sentences(&a, &matches);
        let ner = MockNer::new(vec![NerRule::organization("Allianz")]);
        let decision = entity_gate(&sentences, &ner, &default_org_labels()).unwrap();
        assert!(decision.keep);
        assert_eq!(decision.labels[0].1.as_deref(), Some("organization"));
    }

    #[test]
    fn gate_drops_generic_alliance_usage() {
        let a = article(&["Es entsteht eine Allianz der Staaten gegen die Krise."]);
        let matches = match_keywords(&a, &spec(&["Allianz"]), MatchPolicy::default());
        let sentences = keyword_sentences(&a, &matches);
        let ner = MockNer::new(vec![NerRule::organization("Allianz").blocked_by("der Staaten")]);
        let decision = entity_gate(&sentences, &ner, &default_org_labels()).unwrap();
        assert!(!decision.keep);
        assert_eq!(decision.labels[0].1, None);
    }

    #[test]
    fn any_organization_keyword_keeps() {
        let a = article(&["Allianz und Siemens kooperieren."]);
        let matches = match_keywords(&a, &spec(&["Allianz", "Siemens"]), MatchPolicy::default());
        let sentences = keyword_sentences(&a, &matches);
        // Only Siemens is tagged.
        let ner = MockNer::new(vec![NerRule::organization("Siemens")]);
        let decision = entity_gate(&sentences, &ner, &default_org_labels()).unwrap();
        assert!(decision.keep);
    }

    /// Adversarial provider tagging an organization far away from the
    /// keyword: must not cause a keep.
    struct ElsewhereNer;

    impl NerProvider for ElsewhereNer {
        fn id(&self) -> &str {
            "elsewhere"
        }
        fn entities(
            &self,
            sentence: &str,
            _labels: &[String],
        ) -> crate::error::Result<Vec<EntitySpan>> {
            let pos = sentence.find("Regierung").unwrap_or(0);
            Ok(vec![EntitySpan {
                text: "Regierung".into(),
                label: "organization".into(),
                start: pos,
                end: pos + "Regierung".len(),
            }])
        }
    }

    #[test]
    fn organization_elsewhere_in_sentence_never_keeps() {
        let a = article(&["Eine Allianz gegen die Regierung entsteht."]);
        let matches = match_keywords(&a, &spec(&["Allianz"]), MatchPolicy::default());
        let sentences = keyword_sentences(&a, &matches);
        let decision = entity_gate(&sentences, &ElsewhereNer, &default_org_labels()).unwrap();
        assert!(!decision.keep);
    }

    struct FailingNer;

    impl NerProvider for FailingNer {
        fn id(&self) -> &str {
            "failing"
        }
        fn entities(
            &self,
            _sentence: &str,
            _labels: &[String],
        ) -> crate::error::Result<Vec<EntitySpan>> {
            Err(crate::error::Error::provider("failing", "down"))
        }
    }

    #[test]
    fn provider_failure_propagates_for_quarantine() {
        let a = article(&["Allianz meldet Zahlen."]);
        let matches = match_keywords(&a, &spec(&["Allianz"]), MatchPolicy::default());
        let sentences = keyword_sentences(&a, &matches);
        assert!(entity_gate(&sentences, &FailingNer, &default_org_labels()).is_err());
    }
}
