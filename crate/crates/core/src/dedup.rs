//! Near-duplicate removal over embeddings within a sliding time window.
//!
//! Items are processed in ascending (timestamp, id) order; an item is
//! discarded when some already-kept item within the window reaches the
//! similarity threshold, and maps to the earliest such kept item. The
//! comparison is greedy against kept items only, never transitively through
//! discarded ones.

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use crate::corpus::{Article, KeywordMatch};
use crate::error::{Error, Result};
use crate::providers::{Embedder, EmbeddingVector};

/// How multi-vector items are compared: max is the conservative duplicate
/// detector, mean is available for experimentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Max,
    Mean,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DedupConfig {
    pub similarity_threshold: f64,
    pub window_days: f64,
    #[serde(default)]
    pub aggregation: Aggregation,
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig {
            similarity_threshold: 0.8,
            window_days: 7.0,
            aggregation: Aggregation::Max,
        }
    }
}

impl DedupConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.similarity_threshold.is_finite() || self.similarity_threshold < 0.0 {
            return Err(Error::validation("similarity threshold must be finite and >= 0"));
        }
        if self.window_days <= 0.0 {
            return Err(Error::validation("dedup window must be positive"));
        }
        Ok(())
    }

    fn window(&self) -> Duration {
        Duration::milliseconds((self.window_days * 86_400_000.0).round() as i64)
    }
}

/// Outcome partition: kept and discarded ids are disjoint and together
/// cover the input; every representative is a kept id.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DedupOutcome {
    pub kept_ids: Vec<String>,
    pub discarded: BTreeMap<String, String>,
}

impl DedupOutcome {
    pub fn is_kept(&self, id: &str) -> bool {
        self.kept_ids.iter().any(|k| k == id)
    }

    fn merge(&mut self, other: DedupOutcome) {
        self.kept_ids.extend(other.kept_ids);
        self.discarded.extend(other.discarded);
    }
}

/// Cosine similarity of two vectors: dot(a,b) / (‖a‖‖b‖).
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(dot / (na.sqrt() * nb.sqrt()))
}

/// One deduplicatable item: an id, a timestamp and at least one vector.
#[derive(Debug, Clone)]
pub struct DedupItem {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    pub vectors: Vec<EmbeddingVector>,
}

fn aggregated_similarity(a: &DedupItem, b: &DedupItem, agg: Aggregation) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut count = 0usize;
    for va in &a.vectors {
        for vb in &b.vectors {
            let s = cosine_similarity(va, vb)?;
            best = best.max(s);
            sum += s;
            count += 1;
        }
    }
    Ok(match agg {
        Aggregation::Max => best,
        Aggregation::Mean => sum / count as f64,
    })
}

/// Greedy pass in ascending (timestamp, id) order. Input order does not
/// affect the outcome.
pub fn dedup_stream(items: &[DedupItem], cfg: &DedupConfig) -> Result<DedupOutcome> {
    cfg.validate()?;
    for item in items {
        if item.vectors.is_empty() {
            return Err(Error::validation(format!("dedup item `{}` has no vectors", item.id)));
        }
    }
    if let Some(first) = items.first() {
        let dim = first.vectors[0].dim();
        for item in items {
            for v in &item.vectors {
                if v.dim() != dim {
                    return Err(Error::DimensionMismatch { left: dim, right: v.dim() });
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        (items[a].timestamp, &items[a].id).cmp(&(items[b].timestamp, &items[b].id))
    });

    let window = cfg.window();
    let mut outcome = DedupOutcome::default();
    let mut kept: Vec<usize> = Vec::new();
    for &idx in &order {
        let candidate = &items[idx];
        let mut representative = None;
        for &kept_idx in &kept {
            let kept_item = &items[kept_idx];
            let gap = candidate.timestamp - kept_item.timestamp;
            if gap > window {
                continue;
            }
            if aggregated_similarity(candidate, kept_item, cfg.aggregation)?
                >= cfg.similarity_threshold
            {
                representative = Some(kept_item.id.clone());
                break;
            }
        }
        match representative {
            Some(rep) => {
                outcome.discarded.insert(candidate.id.clone(), rep);
            }
            None => {
                kept.push(idx);
                outcome.kept_ids.push(candidate.id.clone());
            }
        }
    }
    Ok(outcome)
}

/// Per-company paragraph deduplication: embeds the distinct
/// keyword-containing paragraphs of each article and runs the greedy pass
/// within each company stream. Returns the merged outcome plus any records
/// excluded for having no keyword paragraphs.
pub fn dedup_paragraph_stage(
    records: &[(String, Article, Vec<KeywordMatch>)],
    embedder: &dyn Embedder,
    cfg: &DedupConfig,
) -> Result<(DedupOutcome, Vec<String>)> {
    let mut per_company: BTreeMap<&str, Vec<&(String, Article, Vec<KeywordMatch>)>> =
        BTreeMap::new();
    for record in records {
        per_company.entry(record.1.company_id.as_str()).or_default().push(record);
    }

    let mut outcome = DedupOutcome::default();
    let mut excluded = Vec::new();
    for (_, group) in per_company {
        let mut items = Vec::new();
        for (key, article, matches) in group {
            let mut para_indices: Vec<usize> =
                matches.iter().map(|m| m.paragraph_index).collect();
            para_indices.sort_unstable();
            para_indices.dedup();
            let mut texts: Vec<String> = para_indices
                .iter()
                .filter_map(|&i| article.paragraphs.get(i).cloned())
                .collect();
            texts.sort();
            texts.dedup();
            if texts.is_empty() {
                log::warn!("record `{key}` has no keyword paragraphs; excluded from dedup");
                excluded.push(key.clone());
                continue;
            }
            let vectors = embedder.embed_texts(&texts)?;
            items.push(DedupItem {
                id: key.clone(),
                timestamp: article.published_at,
                vectors,
            });
        }
        outcome.merge(dedup_stream(&items, cfg)?);
    }
    Ok((outcome, excluded))
}

/// Summary deduplication: one vector per record, built from its filter-stage
/// summary; the greedy pass runs within each company stream, matching the
/// paragraph stage. Records with an empty summary are quarantined, not
/// dropped.
pub fn dedup_summary_stage(
    records: &[(String, String, DateTime<Utc>, String)],
    embedder: &dyn Embedder,
    cfg: &DedupConfig,
) -> Result<(DedupOutcome, Vec<String>)> {
    let mut per_company: BTreeMap<&str, Vec<DedupItem>> = BTreeMap::new();
    let mut quarantined = Vec::new();
    for (id, company_id, timestamp, summary) in records {
        if summary.trim().is_empty() {
            quarantined.push(id.clone());
            continue;
        }
        let vectors = embedder.embed_texts(std::slice::from_ref(summary))?;
        per_company.entry(company_id.as_str()).or_default().push(DedupItem {
            id: id.clone(),
            timestamp: *timestamp,
            vectors,
        });
    }
    let mut outcome = DedupOutcome::default();
    for items in per_company.values() {
        outcome.merge(dedup_stream(items, cfg)?);
    }
    Ok((outcome, quarantined))
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn vector(values: &[f64]) -> EmbeddingVector {
        EmbeddingVector::new(values.to_vec()).unwrap()
    }

    fn item(id: &str, day: i64, values: &[f64]) -> DedupItem {
        DedupItem {
            id: id.into(),
            timestamp: Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap()
                + Duration::days(day),
            vectors: vec![vector(values)],
        }
    }

    #[test]
    fn cosine_identities() {
        let a = vector(&[1.0, 0.0]);
        assert!((cosine_similarity(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        let b = vector(&[0.0, 1.0]);
        assert!(cosine_similarity(&a, &b).unwrap().abs() < 1e-15);
    }

    #[test]
    fn cosine_hand_computed() {
        // 32 / (sqrt(14) * sqrt(77))
        let s = cosine_similarity(&vector(&[1.0, 2.0, 3.0]), &vector(&[4.0, 5.0, 6.0])).unwrap();
        assert!((s - 0.974631846).abs() < 1e-9, "{s}");
    }

    #[test]
    fn cosine_rejects_degenerate_inputs() {
        let a = vector(&[1.0, 0.0]);
        assert!(matches!(
            cosine_similarity(&a, &vector(&[0.0, 0.0])),
            Err(Error::ZeroNorm)
        ));
        assert!(matches!(
            cosine_similarity(&a, &vector(&[1.0, 0.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_item_is_kept() {
        let out = dedup_stream(&[item("a", 0, &[1.0, 0.0])], &DedupConfig::default()).unwrap();
        assert_eq!(out.kept_ids, vec!["a"]);
        assert!(out.discarded.is_empty());
    }

    #[test]
    fn identical_within_window_discards_second() {
        let out = dedup_stream(
            &[item("a", 0, &[1.0, 1.0]), item("b", 1, &[1.0, 1.0])],
            &DedupConfig::default(),
        )
        .unwrap();
        assert_eq!(out.kept_ids, vec!["a"]);
        assert_eq!(out.discarded.get("b").unwrap(), "a");
    }

    #[test]
    fn identical_outside_window_both_kept() {
        let out = dedup_stream(
            &[item("a", 0, &[1.0, 1.0]), item("b", 8, &[1.0, 1.0])],
            &DedupConfig::default(),
        )
        .unwrap();
        assert_eq!(out.kept_ids, vec!["a", "b"]);
    }

    #[test]
    fn window_boundary_is_inclusive_at_exactly_seven_days() {
        let out = dedup_stream(
            &[item("a", 0, &[1.0, 1.0]), item("b", 7, &[1.0, 1.0])],
            &DedupConfig::default(),
        )
        .unwrap();
        assert_eq!(out.kept_ids, vec!["a"]);
        assert_eq!(out.discarded.get("b").unwrap(), "a");
    }

    #[test]
    fn comparison_is_against_kept_items_only() {
        // b duplicates a (discarded); c is within window of b but not of a,
        // and similar only to b: chains through discarded items must NOT
        // discard c.
        let cfg = DedupConfig::default();
        let out = dedup_stream(
            &[
                item("a", 0, &[1.0, 1.0]),
                item("b", 6, &[1.0, 1.0]),
                item("c", 12, &[1.0, 1.0]),
            ],
            &cfg,
        )
        .unwrap();
        // c is 12 days after a (outside window), 6 days after discarded b.
        assert_eq!(out.kept_ids, vec!["a", "c"]);
        assert_eq!(out.discarded.get("b").unwrap(), "a");
    }

    /// Quadratic brute-force oracle evaluating the same greedy rule.
    fn oracle(items: &[DedupItem], cfg: &DedupConfig) -> DedupOutcome {
        let mut sorted: Vec<&DedupItem> = items.iter().collect();
        sorted.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
        let mut kept: Vec<&DedupItem> = Vec::new();
        let mut outcome = DedupOutcome::default();
        'next: for cand in sorted {
            for k in &kept {
                let days = (cand.timestamp - k.timestamp).num_milliseconds() as f64 / 86_400_000.0;
                if days <= cfg.window_days {
                    let mut best = f64::NEG_INFINITY;
                    let mut sum = 0.0;
                    let mut n = 0;
                    for va in &cand.vectors {
                        for vb in &k.vectors {
                            let dot: f64 = va
                                .as_slice()
                                .iter()
                                .zip(vb.as_slice())
                                .map(|(x, y)| x * y)
                                .sum();
                            let na: f64 =
                                va.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
                            let nb: f64 =
                                vb.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
                            let s = dot / (na * nb);
                            best = best.max(s);
                            sum += s;
                            n += 1;
                        }
                    }
                    let agg = match cfg.aggregation {
                        Aggregation::Max => best,
                        Aggregation::Mean => sum / n as f64,
                    };
                    if agg >= cfg.similarity_threshold {
                        outcome.discarded.insert(cand.id.clone(), k.id.clone());
                        continue 'next;
                    }
                }
            }
            kept.push(cand);
            outcome.kept_ids.push(cand.id.clone());
        }
        outcome
    }

    fn random_instance(rng: &mut impl Rng, n: usize) -> Vec<DedupItem> {
        // A few base directions so near-duplicates actually occur.
        let bases: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        (0..n)
            .map(|i| {
                let base = &bases[rng.gen_range(0..bases.len())];
                let jitter: Vec<f64> = base
                    .iter()
                    .map(|v| v + rng.gen_range(-0.15..0.15))
                    .collect();
                let n_vectors = rng.gen_range(1..3);
                let vectors = (0..n_vectors)
                    .map(|_| {
                        vector(
                            &jitter
                                .iter()
                                .map(|v| v + rng.gen_range(-0.05..0.05))
                                .collect::<Vec<_>>(),
                        )
                    })
                    .collect();
                DedupItem {
                    id: format!("i{i:03}"),
                    timestamp: Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap()
                        + Duration::hours(rng.gen_range(0..24 * 40))
                        // Exercise exact 7-day boundaries now and then.
                        + Duration::days(if rng.gen_bool(0.2) { 7 } else { 0 }),
                    vectors,
                }
            })
            .collect()
    }

    #[test]
    fn randomized_instances_match_brute_force_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for case in 0..100 {
            let n = rng.gen_range(1..=50);
            let items = random_instance(&mut rng, n);
            let cfg = DedupConfig {
                similarity_threshold: rng.gen_range(0.5..0.99),
                window_days: 7.0,
                aggregation: if rng.gen_bool(0.5) { Aggregation::Max } else { Aggregation::Mean },
            };
            let got = dedup_stream(&items, &cfg).unwrap();
            let want = oracle(&items, &cfg);
            assert_eq!(got.kept_ids, want.kept_ids, "case {case}");
            assert_eq!(got.discarded, want.discarded, "case {case}");
        }
    }

    #[test]
    fn determinism_under_input_shuffle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut items = random_instance(&mut rng, 30);
        let cfg = DedupConfig::default();
        let out1 = dedup_stream(&items, &cfg).unwrap();
        items.reverse();
        let out2 = dedup_stream(&items, &cfg).unwrap();
        assert_eq!(out1.kept_ids, out2.kept_ids);
        assert_eq!(out1.discarded, out2.discarded);
    }

    #[test]
    fn threshold_above_one_keeps_everything() {
        let items = vec![item("a", 0, &[1.0, 1.0]), item("b", 1, &[1.0, 1.0])];
        let cfg = DedupConfig { similarity_threshold: 1.000001, ..Default::default() };
        let out = dedup_stream(&items, &cfg).unwrap();
        assert_eq!(out.kept_ids.len(), 2);
    }

    #[test]
    fn zero_window_is_rejected_and_tiny_window_groups_same_timestamp_only() {
        let items = vec![
            item("a", 0, &[1.0, 1.0]),
            item("b", 0, &[1.0, 1.0]),
            item("c", 1, &[1.0, 1.0]),
        ];
        let zero = DedupConfig { window_days: 0.0, ..Default::default() };
        assert!(dedup_stream(&items, &zero).is_err());
        // A vanishing window degenerates to exact-timestamp grouping.
        let tiny = DedupConfig { window_days: 1e-9, ..Default::default() };
        let out = dedup_stream(&items, &tiny).unwrap();
        assert_eq!(out.kept_ids, vec!["a", "c"]);
        assert_eq!(out.discarded.get("b").unwrap(), "a");
    }

    proptest! {
        #[test]
        fn partition_property_holds(seed in 0u64..500, n in 1usize..40) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let items = random_instance(&mut rng, n);
            let out = dedup_stream(&items, &DedupConfig::default()).unwrap();
            let mut covered: Vec<&str> = out.kept_ids.iter().map(|s| s.as_str()).collect();
            covered.extend(out.discarded.keys().map(|s| s.as_str()));
            covered.sort_unstable();
            let mut input: Vec<&str> = items.iter().map(|i| i.id.as_str()).collect();
            input.sort_unstable();
            prop_assert_eq!(covered, input);
            for rep in out.discarded.values() {
                prop_assert!(out.kept_ids.contains(rep));
            }
        }

        #[test]
        fn raising_threshold_never_decreases_kept_for_pairs(seed in 0u64..200,
                                                            t1 in 0.4f64..0.9, dt in 0.0f64..0.1) {
            // Monotonicity holds unconditionally for two items; for longer
            // greedy chains it does not (see the counterexample below).
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let items = random_instance(&mut rng, 2);
            let low = DedupConfig { similarity_threshold: t1, ..Default::default() };
            let high = DedupConfig { similarity_threshold: (t1 + dt).min(1.0), ..Default::default() };
            let kept_low = dedup_stream(&items, &low).unwrap().kept_ids.len();
            let kept_high = dedup_stream(&items, &high).unwrap().kept_ids.len();
            prop_assert!(kept_high >= kept_low);
        }
    }

    #[test]
    fn greedy_chains_break_global_threshold_monotonicity() {
        // Raising the threshold can KEEP an intermediate item which then
        // absorbs several later items, reducing the kept count overall.
        // The greedy keep-first rule makes this unavoidable; the oracle
        // equivalence above is the binding correctness check.
        // sim(a,b) ≈ 0.75; sim(b,c) = sim(b,d) ≈ 0.906; every other pair
        // is below 0.68.
        let items = vec![
            item("a", 0, &[0.75, 0.0, 0.6614]),
            item("b", 1, &[1.0, 0.0, 0.0]),
            item("c", 2, &[0.9063, 0.4226, 0.0]),
            item("d", 3, &[0.9063, -0.4226, 0.0]),
        ];
        // Threshold 0.71: b is absorbed by a, then c and d survive.
        let low = DedupConfig { similarity_threshold: 0.71, ..Default::default() };
        // Threshold 0.85: b survives and absorbs both c and d.
        let high = DedupConfig { similarity_threshold: 0.85, ..Default::default() };
        let kept_low = dedup_stream(&items, &low).unwrap().kept_ids;
        let kept_high = dedup_stream(&items, &high).unwrap().kept_ids;
        assert_eq!(kept_low, vec!["a", "c", "d"]);
        assert_eq!(kept_high, vec!["a", "b"]);
        assert!(kept_low.len() > kept_high.len());
    }

    #[test]
    fn paragraph_stage_is_scoped_per_company() {
        use crate::corpus::{CompanySpec, MatchPolicy};
        use crate::providers::MockEmbedder;

        let embedder = MockEmbedder::new(5, 16);
        let specs = [
            CompanySpec {
                company_id: "alpha".into(),
                display_name: "Alpha".into(),
                keywords: vec!["Alpha".into()],
                related_company_ids: vec![],
            },
            CompanySpec {
                company_id: "beta".into(),
                display_name: "Beta".into(),
                keywords: vec!["Beta".into()],
                related_company_ids: vec![],
            },
        ];
        // Identical wording mentioning both companies, published a day
        // apart: within one company the second record is a duplicate, but
        // company streams never affect each other.
        let mk = |id: &str, company: &str, day: i64| {
            let article = Article {
                id: id.into(),
                company_id: company.into(),
                url: format!("https://news.example/{id}"),
                title: "t".into(),
                paragraphs: vec![format!("Alpha and Beta announce a joint venture")],
                published_at: Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap()
                    + Duration::days(day),
                language: "en".into(),
            };
            let spec = specs.iter().find(|s| s.company_id == company).unwrap();
            let matches = crate::corpus::match_keywords(&article, spec, MatchPolicy::default());
            (format!("{company}::{id}"), article, matches)
        };
        let records = vec![
            mk("a1", "alpha", 0),
            mk("a2", "alpha", 1),
            mk("b1", "beta", 0),
            mk("b2", "beta", 1),
        ];
        let (joint, excluded) =
            dedup_paragraph_stage(&records, &embedder, &DedupConfig::default()).unwrap();
        assert!(excluded.is_empty());

        // Oracle: run each company partition alone; the joint outcome must
        // match the union.
        let mut partitioned = DedupOutcome::default();
        for company in ["alpha", "beta"] {
            let sub: Vec<_> = records
                .iter()
                .filter(|r| r.1.company_id == company)
                .cloned()
                .collect();
            let (out, _) =
                dedup_paragraph_stage(&sub, &embedder, &DedupConfig::default()).unwrap();
            partitioned.merge(out);
        }
        let mut joint_kept = joint.kept_ids.clone();
        let mut part_kept = partitioned.kept_ids.clone();
        joint_kept.sort();
        part_kept.sort();
        assert_eq!(joint_kept, part_kept);
        assert_eq!(joint.discarded, partitioned.discarded);
        assert_eq!(joint.discarded.get("alpha::a2").unwrap(), "alpha::a1");
        assert_eq!(joint.discarded.get("beta::b2").unwrap(), "beta::b1");
    }

    #[test]
    fn summary_stage_quarantines_empty_summaries() {
        use crate::providers::MockEmbedder;
        let embedder = MockEmbedder::new(5, 16);
        let t0 = Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap();
        let c = |id: &str, days: i64, summary: &str| {
            ("x::".to_string() + id, "x".to_string(), t0 + Duration::days(days), summary.to_string())
        };
        let records = vec![
            c("a", 0, "eine zusammenfassung"),
            c("b", 1, "  "),
            c("c", 2, "eine zusammenfassung"),
        ];
        let (out, quarantined) =
            dedup_summary_stage(&records, &embedder, &DedupConfig::default()).unwrap();
        assert_eq!(quarantined, vec!["x::b"]);
        assert_eq!(out.kept_ids, vec!["x::a"]);
        assert_eq!(out.discarded.get("x::c").unwrap(), "x::a");
    }

    #[test]
    fn summary_stage_is_scoped_per_company() {
        use crate::providers::MockEmbedder;
        let embedder = MockEmbedder::new(5, 16);
        let t0 = Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap();
        // The same article summarized for two companies: identical
        // summaries must not collapse across streams.
        let records = vec![
            ("alpha::a1".to_string(), "alpha".to_string(), t0, "gemeinsame meldung".to_string()),
            ("beta::a1".to_string(), "beta".to_string(), t0, "gemeinsame meldung".to_string()),
        ];
        let (out, quarantined) =
            dedup_summary_stage(&records, &embedder, &DedupConfig::default()).unwrap();
        assert!(quarantined.is_empty());
        assert_eq!(out.kept_ids.len(), 2);
    }
}
