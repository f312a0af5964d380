//! Topic detection over keyword-augmented summary embeddings.
//!
//! Summaries are augmented with the determination keywords (minus company
//! mentions), embedded, clustered with seeded spherical k-means and named
//! via class-based TF-IDF. Topics are ranked by mean relevance score.

pub mod kmeans;
pub mod tfidf;

use std::collections::BTreeMap;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::dataset::DatasetRecord;
use crate::providers::EmbeddingVector;

/// Append the determination keywords to a summary, dropping keywords that
/// contain a company name (case-insensitive containment).
pub fn augment_text(summary: &str, keywords: &[String], company_names: &[String]) -> String {
    let lowered_names: Vec<String> = company_names.iter().map(|n| n.to_lowercase()).collect();
    let surviving: Vec<&str> = keywords
        .iter()
        .filter(|k| {
            let k_lower = k.to_lowercase();
            !lowered_names.iter().any(|n| k_lower.contains(n.as_str()))
        })
        .map(|k| k.as_str())
        .collect();
    if surviving.is_empty() {
        summary.to_string()
    } else {
        format!("{summary} {}", surviving.join(" "))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterConfig {
    /// Fixed cluster count; `None` uses the ⌈√(n/2)⌉ heuristic.
    pub k: Option<usize>,
    /// Upper bound for the heuristic k.
    pub k_cap: usize,
    /// Below this many documents everything lands in one catch-all cluster.
    pub min_docs: usize,
    /// Clusters smaller than this become outliers (label −1).
    pub min_cluster_size: usize,
    pub seed: u64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig { k: None, k_cap: 16, min_docs: 5, min_cluster_size: 5, seed: 0 }
    }
}

/// Cluster document vectors; labels are dense non-negative ids with −1 for
/// outliers. Deterministic under a fixed seed; every non-outlier cluster
/// has at least `min_cluster_size` members.
pub fn cluster_documents(vectors: &[EmbeddingVector], cfg: &ClusterConfig) -> Vec<i64> {
    let n = vectors.len();
    if n == 0 {
        return Vec::new();
    }
    if n < cfg.min_docs {
        return vec![0; n];
    }
    let k = cfg
        .k
        .unwrap_or_else(|| ((n as f64 / 2.0).sqrt().ceil() as usize).min(cfg.k_cap))
        .max(1);
    let result = kmeans::spherical_kmeans(vectors, k, cfg.seed);

    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for &label in &result.labels {
        *sizes.entry(label).or_insert(0) += 1;
    }
    // Dense relabeling in ascending original-label order; undersized
    // clusters become outliers.
    let mut mapping: BTreeMap<usize, i64> = BTreeMap::new();
    let mut next = 0i64;
    for (&label, &size) in &sizes {
        if size >= cfg.min_cluster_size {
            mapping.insert(label, next);
            next += 1;
        }
    }
    result
        .labels
        .iter()
        .map(|l| mapping.get(l).copied().unwrap_or(-1))
        .collect()
}

/// Monthly positive/negative article counts per aspect for one topic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonthlyTopicCounts {
    pub year: i32,
    pub month: u32,
    /// Positive counts indexed E, S, G.
    pub positive: [u64; 3],
    /// Negative counts indexed E, S, G.
    pub negative: [u64; 3],
}

/// One detected cluster: representative terms, members and the aggregates
/// used to rank and read it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic_id: i64,
    pub member_keys: Vec<String>,
    pub top_terms: Vec<(String, f64)>,
    pub mean_relevance: f64,
    pub mean_sentiment: f64,
    pub monthly: Vec<MonthlyTopicCounts>,
}

/// Build per-topic summaries from clustered records, sorted by descending
/// mean relevance (stable, ties on topic id). Outliers (label −1) are
/// skipped. `documents[i]` is the augmented text that was embedded for
/// `records[i]`.
pub fn topic_report(
    records: &[DatasetRecord],
    documents: &[String],
    labels: &[i64],
    top_k_terms: usize,
) -> Vec<TopicSummary> {
    assert_eq!(records.len(), labels.len(), "labels must align with records");
    assert_eq!(records.len(), documents.len(), "documents must align with records");

    let mut class_docs: BTreeMap<i64, Vec<String>> = BTreeMap::new();
    let mut members: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &label) in labels.iter().enumerate() {
        if label < 0 {
            continue;
        }
        class_docs.entry(label).or_default().push(documents[i].clone());
        members.entry(label).or_default().push(i);
    }
    let terms = tfidf::class_tfidf(&class_docs, top_k_terms);

    let mut topics = Vec::new();
    for (topic_id, idxs) in members {
        let n = idxs.len() as f64;
        let mean_relevance =
            idxs.iter().map(|&i| records[i].relevance_score as f64).sum::<f64>() / n;
        let mean_sentiment = idxs.iter().map(|&i| records[i].sentiment.value()).sum::<f64>() / n;
        let mut monthly: BTreeMap<(i32, u32), MonthlyTopicCounts> = BTreeMap::new();
        for &i in &idxs {
            let r = &records[i];
            let date = r.published_at.date_naive();
            let entry = monthly.entry((date.year(), date.month())).or_insert(MonthlyTopicCounts {
                year: date.year(),
                month: date.month(),
                positive: [0; 3],
                negative: [0; 3],
            });
            match r.sentiment {
                crate::types::Sentiment::Positive => entry.positive[r.aspect.index()] += 1,
                crate::types::Sentiment::Negative => entry.negative[r.aspect.index()] += 1,
                crate::types::Sentiment::Neutral => {}
            }
        }
        topics.push(TopicSummary {
            topic_id,
            member_keys: idxs.iter().map(|&i| records[i].key()).collect(),
            top_terms: terms.get(&topic_id).cloned().unwrap_or_default(),
            mean_relevance,
            mean_sentiment,
            monthly: monthly.into_values().collect(),
        });
    }
    topics.sort_by(|a, b| {
        b.mean_relevance
            .partial_cmp(&a.mean_relevance)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.topic_id.cmp(&b.topic_id))
    });
    topics
}
