//! Class-based TF-IDF term weighting for naming topic clusters.
//!
//! Each cluster's documents are concatenated into one class document;
//! a term's weight in class c is `tf(t,c) · ln(1 + A / tf(t))` where
//! `tf(t,c)` counts occurrences in the class document, `tf(t)` counts
//! occurrences across all classes and `A` is the average word count per
//! class.

use std::collections::BTreeMap;

/// German/English stop words stripped during tokenization.
const STOPWORDS: &[&str] = &[
    // German
    "aber", "als", "auch", "auf", "aus", "bei", "bis", "das", "dass", "dem", "den", "der", "des",
    "die", "durch", "ein", "eine", "einem", "einen", "einer", "eines", "er", "es", "für", "hat",
    "haben", "im", "in", "ist", "mit", "nach", "nicht", "noch", "nun", "nur", "oder", "sein",
    "seine", "sich", "sie", "sind", "über", "um", "und", "von", "vor", "war", "werden", "wie",
    "wird", "zu", "zum", "zur", "wurde", "wurden", "beim", "dies", "diese", "dieser", "dieses",
    // English
    "a", "an", "and", "are", "as", "at", "be", "been", "but", "by", "for", "from", "had", "has",
    "have", "he", "her", "his", "if", "into", "is", "it", "its", "more", "not", "of", "on", "or",
    "said", "she", "that", "the", "their", "there", "they", "this", "to", "was", "were", "which",
    "will", "with",
];

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.contains(&token)
}

/// Lowercased word tokens: alphanumeric runs, stop words and single
/// characters removed.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .filter(|t| t.chars().count() > 1 && !is_stopword(t))
        .collect()
}

/// Top `top_k` weighted terms per class. Classes with no tokens are
/// excluded. Weights are non-negative; ranking ties break on the term.
pub fn class_tfidf(
    class_documents: &BTreeMap<i64, Vec<String>>,
    top_k: usize,
) -> BTreeMap<i64, Vec<(String, f64)>> {
    // Per-class term frequencies over the concatenated class document.
    let mut class_tf: BTreeMap<i64, BTreeMap<String, f64>> = BTreeMap::new();
    let mut class_word_count: BTreeMap<i64, f64> = BTreeMap::new();
    let mut corpus_tf: BTreeMap<String, f64> = BTreeMap::new();

    for (&class, docs) in class_documents {
        let mut tf = BTreeMap::new();
        let mut words = 0.0;
        for doc in docs {
            for token in tokenize(doc) {
                *tf.entry(token.clone()).or_insert(0.0) += 1.0;
                *corpus_tf.entry(token).or_insert(0.0) += 1.0;
                words += 1.0;
            }
        }
        if words > 0.0 {
            class_tf.insert(class, tf);
            class_word_count.insert(class, words);
        }
    }
    if class_tf.is_empty() {
        return BTreeMap::new();
    }
    let avg_words_per_class: f64 =
        class_word_count.values().sum::<f64>() / class_word_count.len() as f64;

    let mut out = BTreeMap::new();
    for (&class, tf) in &class_tf {
        let mut weighted: Vec<(String, f64)> = tf
            .iter()
            .map(|(term, &freq)| {
                let total = corpus_tf[term];
                (term.clone(), freq * (1.0 + avg_words_per_class / total).ln())
            })
            .collect();
        weighted.sort_by(|a, b| {
            b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0))
        });
        weighted.truncate(top_k);
        out.insert(class, weighted);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes(input: &[(i64, &[&str])]) -> BTreeMap<i64, Vec<String>> {
        input
            .iter()
            .map(|(c, docs)| (*c, docs.iter().map(|d| d.to_string()).collect()))
            .collect()
    }

    #[test]
    fn single_class_ranking_follows_raw_tf() {
        // One class: the log factor is constant across terms.
        let input = classes(&[(0, &["apfel apfel apfel birne birne kirsche"])]);
        let out = class_tfidf(&input, 10);
        let terms: Vec<&str> = out[&0].iter().map(|(t, _)| t.as_str()).collect();
        assert_eq!(terms, vec!["apfel", "birne", "kirsche"]);
    }

    #[test]
    fn disjoint_classes_match_hand_computed_weights() {
        // c0: "apfel apfel banane" (3 words), c1: "kirsche dattel dattel
        // dattel" (4 words); A = 3.5. No shared terms, so tf(t) is the
        // class frequency itself.
        let input = classes(&[(0, &["apfel apfel banane"]), (1, &["kirsche dattel dattel dattel"])]);
        let out = class_tfidf(&input, 10);
        let w = |class: i64, term: &str| {
            out[&class]
                .iter()
                .find(|(t, _)| t == term)
                .map(|(_, w)| *w)
                .unwrap()
        };
        assert!((w(0, "apfel") - 2.0232018233569597).abs() < 1e-9);
        assert!((w(0, "banane") - 1.5040773967762742).abs() < 1e-9);
        assert!((w(1, "kirsche") - 1.5040773967762742).abs() < 1e-9);
        assert!((w(1, "dattel") - 2.319569664700446).abs() < 1e-9);
    }

    #[test]
    fn cross_class_term_ranked_below_equally_frequent_exclusive_term() {
        // c0: "xx xx yy yy", c1: "xx xx zz zz"; A = 4.
        // weight(xx, c0) = 2·ln(1+4/4) = 1.3862943611198906
        // weight(yy, c0) = 2·ln(1+4/2) = 2.1972245773362196
        let input = classes(&[(0, &["xx xx yy yy"]), (1, &["xx xx zz zz"])]);
        let out = class_tfidf(&input, 10);
        let c0 = &out[&0];
        let w = |term: &str| c0.iter().find(|(t, _)| t == term).map(|(_, w)| *w).unwrap();
        assert!((w("xx") - 1.3862943611198906).abs() < 1e-9);
        assert!((w("yy") - 2.1972245773362196).abs() < 1e-9);
        assert!(w("yy") > w("xx"));
        assert_eq!(c0[0].0, "yy");
    }

    #[test]
    fn weights_are_non_negative_and_absent_terms_unaffected() {
        let before = classes(&[(0, &["solar wind"]), (1, &["kohle gas"])]);
        let out_before = class_tfidf(&before, 10);
        // Add a document to class 1 with entirely new terms: class 0's
        // weights for its own terms change only through A.
        for weights in out_before.values() {
            for (_, w) in weights {
                assert!(*w >= 0.0);
            }
        }
        let after = classes(&[(0, &["solar wind"]), (1, &["kohle gas", "atomkraft strom"])]);
        let out_after = class_tfidf(&after, 10);
        // "solar" still present with positive weight, never dragged to zero
        // by documents in other classes that don't contain it.
        assert!(out_after[&0].iter().any(|(t, _)| t == "solar"));
    }

    #[test]
    fn empty_class_is_excluded() {
        let mut input = classes(&[(0, &["solar wind"])]);
        input.insert(1, vec!["".to_string()]);
        let out = class_tfidf(&input, 10);
        assert!(out.contains_key(&0));
        assert!(!out.contains_key(&1));
    }

    #[test]
    fn tokenizer_strips_stopwords_and_short_tokens() {
        let tokens = tokenize("Die Emissionen der Werke sind zu hoch, said the CEO; x");
        assert!(tokens.contains(&"emissionen".to_string()));
        assert!(tokens.contains(&"ceo".to_string()));
        assert!(!tokens.contains(&"die".to_string()));
        assert!(!tokens.contains(&"the".to_string()));
        assert!(!tokens.contains(&"x".to_string()));
    }
}
