//! Corpus loading, validation, company specifications and keyword matching.
//!
//! The raw corpus is a line-delimited JSON file with one article per line:
//! `{id, url, title, paragraphs[], published_at (RFC 3339), language}`.
//! Company specs live in a single TOML config with one `[[companies]]`
//! table per company.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One crawled news item. `company_id` is empty on freshly loaded articles
/// and is filled in when the article is fanned out per company.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub company_id: String,
    pub url: String,
    pub title: String,
    pub paragraphs: Vec<String>,
    #[serde(deserialize_with = "deserialize_timestamp")]
    pub published_at: DateTime<Utc>,
    pub language: String,
}

/// Timestamps without a timezone are interpreted as UTC, which keeps
/// downstream windowing deterministic.
fn deserialize_timestamp<'de, D>(deserializer: D) -> std::result::Result<DateTime<Utc>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let raw = String::deserialize(deserializer)?;
    if let Ok(dt) = DateTime::parse_from_rfc3339(&raw) {
        return Ok(dt.with_timezone(&Utc));
    }
    for format in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(naive) = chrono::NaiveDateTime::parse_from_str(&raw, format) {
            return Ok(naive.and_utc());
        }
    }
    Err(serde::de::Error::custom(format!("unparseable timestamp `{raw}`")))
}

impl Article {
    fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::validation("article id is empty"));
        }
        if self.paragraphs.is_empty() {
            return Err(Error::validation("article has no paragraphs"));
        }
        if self.paragraphs.iter().any(|p| p.trim().is_empty()) {
            return Err(Error::validation("article contains an empty paragraph"));
        }
        if self.language.is_empty() {
            return Err(Error::validation("article language is empty"));
        }
        Ok(())
    }
}

/// A keyword to search for, with an optional per-keyword case flag for
/// lowercase brand names. In config a keyword is either a plain string
/// (case-sensitive) or a table `{ text = "...", case_insensitive = true }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Keyword {
    Plain(String),
    Full {
        text: String,
        #[serde(default)]
        case_insensitive: bool,
    },
}

impl Keyword {
    pub fn text(&self) -> &str {
        match self {
            Keyword::Plain(t) => t,
            Keyword::Full { text, .. } => text,
        }
    }

    pub fn case_insensitive(&self) -> bool {
        match self {
            Keyword::Plain(_) => false,
            Keyword::Full { case_insensitive, .. } => *case_insensitive,
        }
    }
}

impl From<&str> for Keyword {
    fn from(s: &str) -> Self {
        Keyword::Plain(s.to_string())
    }
}

/// Target company: id, display name, search keywords and related companies
/// that should be named in downstream prompts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompanySpec {
    pub company_id: String,
    pub display_name: String,
    pub keywords: Vec<Keyword>,
    #[serde(default)]
    pub related_company_ids: Vec<String>,
}

impl CompanySpec {
    pub fn validate(&self) -> Result<()> {
        if self.keywords.is_empty() {
            return Err(Error::validation(format!(
                "company `{}` has no keywords",
                self.company_id
            )));
        }
        if self.keywords.iter().any(|k| k.text().is_empty()) {
            return Err(Error::validation(format!(
                "company `{}` has an empty keyword",
                self.company_id
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for k in &self.keywords {
            if !seen.insert(k.text()) {
                return Err(Error::validation(format!(
                    "company `{}` has duplicate keyword `{}`",
                    self.company_id,
                    k.text()
                )));
            }
        }
        if self.related_company_ids.iter().any(|r| r == &self.company_id) {
            return Err(Error::validation(format!(
                "company `{}` lists itself as related",
                self.company_id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct CompanyFile {
    companies: Vec<CompanySpec>,
}

/// Load all company specs from a TOML config and validate their invariants.
pub fn load_company_specs(path: impl AsRef<Path>) -> Result<Vec<CompanySpec>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let file: CompanyFile =
        toml::from_str(&text).map_err(|e| Error::config(format!("company specs: {e}")))?;
    for spec in &file.companies {
        spec.validate()?;
    }
    Ok(file.companies)
}

/// One keyword occurrence inside a paragraph. Offsets are byte offsets,
/// half-open `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordMatch {
    pub article_id: String,
    pub paragraph_index: usize,
    pub keyword: String,
    pub start: usize,
    pub end: usize,
}

/// How keyword occurrences are detected.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MatchPolicy {
    /// Require non-alphanumeric characters (or the string edge) on both
    /// sides of a hit.
    pub word_boundary: bool,
}

impl Default for MatchPolicy {
    fn default() -> Self {
        MatchPolicy { word_boundary: true }
    }
}

/// Keep only English and German articles.
pub fn filter_language(article: &Article) -> bool {
    matches!(article.language.as_str(), "en" | "de")
}

/// Find every occurrence of every company keyword across all paragraphs.
/// An empty result means the article does not belong to this company's
/// stream.
pub fn match_keywords(
    article: &Article,
    spec: &CompanySpec,
    policy: MatchPolicy,
) -> Vec<KeywordMatch> {
    let mut out = Vec::new();
    for (para_idx, paragraph) in article.paragraphs.iter().enumerate() {
        let chars: Vec<(usize, char)> = paragraph.char_indices().collect();
        for keyword in &spec.keywords {
            let needle: Vec<char> = keyword.text().chars().collect();
            if needle.is_empty() || needle.len() > chars.len() {
                continue;
            }
            let fold = keyword.case_insensitive();
            for window_start in 0..=(chars.len() - needle.len()) {
                if !window_matches(&chars, window_start, &needle, fold) {
                    continue;
                }
                if policy.word_boundary
                    && !has_word_boundary(&chars, window_start, needle.len())
                {
                    continue;
                }
                let start = chars[window_start].0;
                let end_idx = window_start + needle.len();
                let end = if end_idx < chars.len() {
                    chars[end_idx].0
                } else {
                    paragraph.len()
                };
                out.push(KeywordMatch {
                    article_id: article.id.clone(),
                    paragraph_index: para_idx,
                    keyword: keyword.text().to_string(),
                    start,
                    end,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        (a.paragraph_index, a.start, a.end, &a.keyword)
            .cmp(&(b.paragraph_index, b.start, b.end, &b.keyword))
    });
    out
}

fn window_matches(chars: &[(usize, char)], start: usize, needle: &[char], fold: bool) -> bool {
    needle.iter().enumerate().all(|(i, nc)| {
        let hc = chars[start + i].1;
        if fold {
            hc.to_lowercase().eq(nc.to_lowercase())
        } else {
            hc == *nc
        }
    })
}

fn has_word_boundary(chars: &[(usize, char)], start: usize, len: usize) -> bool {
    let before_ok = start == 0 || !chars[start - 1].1.is_alphanumeric();
    let after_ok = start + len >= chars.len() || !chars[start + len].1.is_alphanumeric();
    before_ok && after_ok
}

/// Streaming reader over a line-delimited corpus file. Invalid records are
/// yielded as per-line errors so callers can count and report them.
pub struct CorpusReader {
    path: String,
    lines: std::io::Lines<BufReader<File>>,
    line_no: usize,
}

impl Iterator for CorpusReader {
    type Item = Result<Article>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Result<Article> = serde_json::from_str::<Article>(&line)
                .map_err(|e| Error::Record {
                    path: self.path.clone(),
                    line: self.line_no,
                    message: e.to_string(),
                })
                .and_then(|a| {
                    a.validate().map_err(|e| Error::Record {
                        path: self.path.clone(),
                        line: self.line_no,
                        message: e.to_string(),
                    })?;
                    Ok(a)
                });
            return Some(parsed);
        }
    }
}

/// Open a corpus file for streaming. Missing or unreadable files are fatal;
/// malformed records surface per item during iteration.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<CorpusReader> {
    let path = path.as_ref();
    let file = File::open(path)
        .map_err(|e| Error::config(format!("cannot open corpus {}: {e}", path.display())))?;
    Ok(CorpusReader {
        path: path.display().to_string(),
        lines: BufReader::new(file).lines(),
        line_no: 0,
    })
}

/// Load a whole corpus, splitting valid articles from per-record errors.
pub fn read_corpus(path: impl AsRef<Path>) -> Result<(Vec<Article>, Vec<Error>)> {
    let mut articles = Vec::new();
    let mut errors = Vec::new();
    for item in load_corpus(path)? {
        match item {
            Ok(a) => articles.push(a),
            Err(e) => errors.push(e),
        }
    }
    Ok((articles, errors))
}

/// Write articles in the corpus line format.
pub fn write_corpus(path: impl AsRef<Path>, articles: &[Article]) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    for article in articles {
        serde_json::to_writer(&mut w, article)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
