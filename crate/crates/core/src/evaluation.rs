//! Annotation-evaluation methodology: evaluation-set sampling, sentiment
//! simplification, majority aggregation, Fleiss' kappa and accuracy against
//! the model labels.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::DatasetRecord;
use crate::error::{Error, Result};
use crate::providers::EmbeddingVector;
use crate::topics::kmeans;
use crate::types::{Aspect, Sentiment, ASPECTS, SENTIMENTS};

/// One human annotator's judgment of one sample.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub annotator_id: String,
    pub sample_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_correct: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relevant: Option<bool>,
    #[serde(default)]
    pub sentiments_selected: BTreeSet<Sentiment>,
    #[serde(default)]
    pub not_sure: bool,
    #[serde(default)]
    pub aspects_selected: BTreeSet<Aspect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub most_relevant_aspect: Option<Aspect>,
}

impl AnnotationRecord {
    pub fn validate(&self) -> Result<()> {
        if let Some(most) = self.most_relevant_aspect {
            if !self.aspects_selected.is_empty() && !self.aspects_selected.contains(&most) {
                return Err(Error::validation(format!(
                    "annotator {} sample {}: most relevant aspect {} not among selections",
                    self.annotator_id, self.sample_id, most
                )));
            }
        }
        Ok(())
    }
}

/// Load annotations from `.jsonl` or `.csv` (Argilla-style export with
/// `;`-joined multi-select columns).
pub fn load_annotations(path: impl AsRef<Path>) -> Result<Vec<AnnotationRecord>> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingInput(path.to_path_buf()));
    }
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let records = if ext == "csv" { load_annotations_csv(path)? } else { load_annotations_jsonl(path)? };
    for r in &records {
        r.validate()?;
    }
    Ok(records)
}

fn load_annotations_jsonl(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: AnnotationRecord =
            serde_json::from_str(line).map_err(|e| Error::Record {
                path: path.display().to_string(),
                line: i + 1,
                message: e.to_string(),
            })?;
        out.push(record);
    }
    Ok(out)
}

fn parse_opt_bool(s: &str) -> Result<Option<bool>> {
    match s.trim() {
        "" => Ok(None),
        other => crate::llm::parse::parse_bool(other).map(Some),
    }
}

fn load_annotations_csv(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let need = |name: &str| {
        col(name).ok_or_else(|| Error::validation(format!("annotations csv missing column `{name}`")))
    };
    let c_annotator = need("annotator_id")?;
    let c_sample = need("sample_id")?;
    let c_summary = col("summary_correct");
    let c_relevant = col("relevant");
    let c_sentiments = col("sentiments");
    let c_not_sure = col("not_sure");
    let c_aspects = col("aspects");
    let c_most = col("most_relevant_aspect");

    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let sentiments_selected = c_sentiments
            .map(|c| {
                row[c]
                    .split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(crate::llm::parse::parse_sentiment)
                    .collect::<Result<BTreeSet<_>>>()
            })
            .transpose()?
            .unwrap_or_default();
        let aspects_selected = c_aspects
            .map(|c| {
                row[c]
                    .split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(crate::llm::parse::parse_aspect)
                    .collect::<Result<BTreeSet<_>>>()
            })
            .transpose()?
            .unwrap_or_default();
        let most_relevant_aspect = c_most
            .map(|c| {
                let v = row[c].trim();
                if v.is_empty() {
                    Ok(None)
                } else {
                    crate::llm::parse::parse_aspect(v).map(Some)
                }
            })
            .transpose()?
            .flatten();
        out.push(AnnotationRecord {
            annotator_id: row[c_annotator].to_string(),
            sample_id: row[c_sample].to_string(),
            summary_correct: c_summary.map(|c| parse_opt_bool(&row[c])).transpose()?.flatten(),
            relevant: c_relevant.map(|c| parse_opt_bool(&row[c])).transpose()?.flatten(),
            sentiments_selected,
            not_sure: c_not_sure
                .map(|c| parse_opt_bool(&row[c]))
                .transpose()?
                .flatten()
                .unwrap_or(false),
            aspects_selected,
            most_relevant_aspect,
        });
    }
    Ok(out)
}

fn grouped_by_company_sentiment(
    records: &[DatasetRecord],
) -> BTreeMap<(String, Sentiment), Vec<usize>> {
    let mut groups: BTreeMap<(String, Sentiment), Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        groups.entry((r.company.clone(), r.sentiment)).or_default().push(i);
    }
    // Deterministic within-group order.
    for idxs in groups.values_mut() {
        idxs.sort_by(|&a, &b| records[a].key().cmp(&records[b].key()));
    }
    groups
}

/// Summary-evaluation sample: one random record per non-empty
/// (company, sentiment) group. Deterministic under the seed.
pub fn sample_summary_eval(records: &[DatasetRecord], seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for ((_, _), idxs) in grouped_by_company_sentiment(records) {
        let pick = idxs[rng.gen_range(0..idxs.len())];
        out.push(records[pick].key());
    }
    out
}

/// Classification-evaluation sample: per (company, sentiment) subgroup,
/// k-means with k = min(3, size) over the records' embeddings, then the
/// member closest to each centroid by cosine. Duplicate picks collapse.
pub fn sample_classification_eval(
    records: &[DatasetRecord],
    embeddings: &[EmbeddingVector],
    seed: u64,
) -> Vec<String> {
    assert_eq!(records.len(), embeddings.len(), "one embedding per record");
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for ((_, _), idxs) in grouped_by_company_sentiment(records) {
        let vectors: Vec<EmbeddingVector> =
            idxs.iter().map(|&i| embeddings[i].clone()).collect();
        let k = idxs.len().min(3);
        let result = kmeans::spherical_kmeans(&vectors, k, seed);
        for local in kmeans::nearest_members(&vectors, &result) {
            let key = records[idxs[local]].key();
            if seen.insert(key.clone()) {
                out.push(key);
            }
        }
    }
    out
}

/// Reduce an annotator's multi-select sentiment to a single value:
/// neutral + (positive|negative) → the non-neutral one; positive + negative
/// → neutral; not sure → neutral; a singleton maps to itself.
pub fn simplify_sentiment(record: &AnnotationRecord) -> Result<Sentiment> {
    if record.not_sure {
        return Ok(Sentiment::Neutral);
    }
    let s = &record.sentiments_selected;
    if s.is_empty() {
        return Err(Error::validation(format!(
            "annotator {} sample {}: no sentiment selected and not marked unsure",
            record.annotator_id, record.sample_id
        )));
    }
    let has_pos = s.contains(&Sentiment::Positive);
    let has_neg = s.contains(&Sentiment::Negative);
    Ok(match (has_pos, has_neg) {
        (true, true) => Sentiment::Neutral,
        (true, false) => Sentiment::Positive,
        (false, true) => Sentiment::Negative,
        (false, false) => Sentiment::Neutral,
    })
}

/// N subjects × k categories vote-count matrix with a constant rater count
/// per subject.
#[derive(Debug, Clone)]
pub struct AgreementMatrix {
    rows: Vec<Vec<u64>>,
    raters: u64,
}

impl AgreementMatrix {
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::validation("agreement matrix needs at least one subject"));
        }
        let categories = rows[0].len();
        if categories < 2 {
            return Err(Error::validation("agreement matrix needs at least two categories"));
        }
        let raters: u64 = rows[0].iter().sum();
        if raters < 2 {
            return Err(Error::validation("agreement needs at least two raters"));
        }
        for row in &rows {
            if row.len() != categories {
                return Err(Error::validation("ragged agreement matrix"));
            }
            if row.iter().sum::<u64>() != raters {
                return Err(Error::validation("rows must all sum to the same rater count"));
            }
        }
        Ok(AgreementMatrix { rows, raters })
    }

    pub fn subjects(&self) -> usize {
        self.rows.len()
    }

    pub fn raters(&self) -> u64 {
        self.raters
    }
}

/// Fleiss' kappa outcome; the coefficient is undefined when expected
/// agreement is 1 (all votes in a single category).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaOutcome {
    Value(f64),
    Degenerate,
}

impl KappaOutcome {
    pub fn value(self) -> Option<f64> {
        match self {
            KappaOutcome::Value(v) => Some(v),
            KappaOutcome::Degenerate => None,
        }
    }
}

/// κ = (P̄ − P̄ₑ) / (1 − P̄ₑ) with per-subject agreement
/// Pᵢ = (Σⱼ nᵢⱼ² − n) / (n(n−1)) and P̄ₑ = Σⱼ pⱼ².
pub fn fleiss_kappa(matrix: &AgreementMatrix) -> KappaOutcome {
    let n = matrix.raters as f64;
    let n_subjects = matrix.subjects() as f64;
    let categories = matrix.rows[0].len();

    let mut p_bar = 0.0;
    let mut category_totals = vec![0.0; categories];
    for row in &matrix.rows {
        let mut sum_sq = 0.0;
        for (j, &count) in row.iter().enumerate() {
            sum_sq += (count * count) as f64;
            category_totals[j] += count as f64;
        }
        p_bar += (sum_sq - n) / (n * (n - 1.0));
    }
    p_bar /= n_subjects;

    let total_votes = n_subjects * n;
    let p_e: f64 = category_totals
        .iter()
        .map(|t| {
            let p = t / total_votes;
            p * p
        })
        .sum();

    if (1.0 - p_e).abs() < 1e-12 {
        return KappaOutcome::Degenerate;
    }
    KappaOutcome::Value((p_bar - p_e) / (1.0 - p_e))
}

/// Plurality winner over simplified sentiment votes; ties resolve by
/// re-applying the simplification rules to the tied set.
pub fn majority_sentiment(votes: &[Sentiment]) -> Result<Sentiment> {
    if votes.is_empty() {
        return Err(Error::validation("majority_sentiment needs at least one vote"));
    }
    let mut counts = [0u64; 3];
    for v in votes {
        counts[v.index()] += 1;
    }
    let max = *counts.iter().max().unwrap();
    let tied: Vec<Sentiment> = SENTIMENTS
        .into_iter()
        .filter(|s| counts[s.index()] == max)
        .collect();
    if tied.len() == 1 {
        return Ok(tied[0]);
    }
    let has_pos = tied.contains(&Sentiment::Positive);
    let has_neg = tied.contains(&Sentiment::Negative);
    Ok(match (has_pos, has_neg) {
        (true, true) => Sentiment::Neutral,
        (true, false) => Sentiment::Positive,
        (false, true) => Sentiment::Negative,
        (false, false) => Sentiment::Neutral,
    })
}

/// Aggregated gold aspect with a flag for ties that survive both rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AspectAggregate {
    pub aspect: Aspect,
    pub tie_flagged: bool,
}

/// Plurality over all selected aspects; a draw falls back to the aspects
/// annotators individually deemed most relevant; a residual draw picks the
/// first in E < S < G order and flags the tie.
pub fn aggregate_aspect(records: &[AnnotationRecord]) -> Result<AspectAggregate> {
    let mut counts = [0u64; 3];
    let mut any = false;
    for r in records {
        for a in &r.aspects_selected {
            counts[a.index()] += 1;
            any = true;
        }
    }
    if !any {
        return Err(Error::validation("aggregate_aspect needs at least one aspect selection"));
    }
    let max = *counts.iter().max().unwrap();
    let drawn: Vec<Aspect> = ASPECTS.into_iter().filter(|a| counts[a.index()] == max).collect();
    if drawn.len() == 1 {
        return Ok(AspectAggregate { aspect: drawn[0], tie_flagged: false });
    }
    // Tie-break on most_relevant_aspect votes among the drawn aspects.
    let mut most_counts = [0u64; 3];
    for r in records {
        if let Some(m) = r.most_relevant_aspect {
            if drawn.contains(&m) {
                most_counts[m.index()] += 1;
            }
        }
    }
    let most_max = drawn.iter().map(|a| most_counts[a.index()]).max().unwrap();
    let winners: Vec<Aspect> = drawn
        .iter()
        .copied()
        .filter(|a| most_counts[a.index()] == most_max)
        .collect();
    if winners.len() == 1 && most_max > 0 {
        return Ok(AspectAggregate { aspect: winners[0], tie_flagged: false });
    }
    Ok(AspectAggregate { aspect: winners[0], tie_flagged: true })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccuracyResult {
    pub accuracy: f64,
    pub matched: usize,
    pub compared: usize,
    /// Samples excluded because either side lacked a label.
    pub excluded: usize,
}

/// Exact-match fraction over paired labels; samples with a missing label on
/// either side are excluded and counted.
pub fn accuracy<T: PartialEq>(model: &[Option<T>], gold: &[Option<T>]) -> Result<AccuracyResult> {
    if model.len() != gold.len() {
        return Err(Error::validation("accuracy requires matching sample sets"));
    }
    let mut matched = 0;
    let mut compared = 0;
    let mut excluded = 0;
    for (m, g) in model.iter().zip(gold) {
        match (m, g) {
            (Some(m), Some(g)) => {
                compared += 1;
                if m == g {
                    matched += 1;
                }
            }
            _ => excluded += 1,
        }
    }
    Ok(AccuracyResult {
        accuracy: if compared > 0 { matched as f64 / compared as f64 } else { 0.0 },
        matched,
        compared,
        excluded,
    })
}

/// Shares of samples deemed relevant by all raters, by a strict majority,
/// and by at least one rater.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelevancyAgreement {
    pub all: f64,
    pub majority: f64,
    pub any: f64,
    pub samples: usize,
}

pub fn relevancy_agreement(votes_per_sample: &[Vec<bool>]) -> Result<RelevancyAgreement> {
    if votes_per_sample.is_empty() {
        return Err(Error::validation("relevancy agreement needs samples"));
    }
    let n = votes_per_sample.len() as f64;
    let mut all = 0u64;
    let mut majority = 0u64;
    let mut any = 0u64;
    for votes in votes_per_sample {
        if votes.is_empty() {
            return Err(Error::validation("sample without relevancy votes"));
        }
        let yes = votes.iter().filter(|v| **v).count();
        if yes == votes.len() {
            all += 1;
        }
        if yes * 2 > votes.len() {
            majority += 1;
        }
        if yes > 0 {
            any += 1;
        }
    }
    Ok(RelevancyAgreement {
        all: all as f64 / n,
        majority: majority as f64 / n,
        any: any as f64 / n,
        samples: votes_per_sample.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelevanceAgreementRow {
    pub score: u8,
    /// Samples where at least one annotator marked the article irrelevant.
    pub flagged: u64,
    pub total: u64,
    pub ratio: f64,
}

/// Everything the evaluation report carries; fields are `None` when the
/// annotations don't cover the corresponding judgment.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationSummary {
    /// Share of summary-task samples where every judging annotator marked
    /// the summary correct.
    pub summary_all_correct_ratio: Option<f64>,
    pub relevancy: Option<RelevancyAgreement>,
    pub kappa_sentiment: Option<f64>,
    pub kappa_aspect: Option<f64>,
    pub sentiment_accuracy: Option<f64>,
    pub aspect_accuracy: Option<f64>,
    pub relevance_table: Vec<RelevanceAgreementRow>,
}

fn kappa_from_groups<F>(groups: &[&Vec<&AnnotationRecord>], label: F) -> Option<f64>
where
    F: Fn(&AnnotationRecord) -> Option<usize>,
{
    // Rows restricted to the modal rater count so the matrix stays
    // rectangular.
    let mut rows_by_raters: BTreeMap<usize, Vec<Vec<u64>>> = BTreeMap::new();
    for group in groups {
        let labels: Vec<usize> = group.iter().filter_map(|n| label(n)).collect();
        if labels.len() != group.len() || labels.is_empty() {
            continue;
        }
        let mut row = vec![0u64; 3];
        for l in labels {
            row[l] += 1;
        }
        rows_by_raters.entry(group.len()).or_default().push(row);
    }
    let (_, rows) = rows_by_raters.into_iter().max_by_key(|(_, rows)| rows.len())?;
    let matrix = AgreementMatrix::new(rows).ok()?;
    fleiss_kappa(&matrix).value()
}

/// Join annotator records to the model's dataset records (on
/// `sample_id` = record key) and compute every evaluation metric: summary
/// correctness, relevancy agreement, Fleiss' kappa on the relevant-by-all
/// subset, majority-gold accuracies and the per-score relevance table.
pub fn evaluate_against_dataset(
    records: &[DatasetRecord],
    notes: &[AnnotationRecord],
) -> Result<EvaluationSummary> {
    let by_key: BTreeMap<String, &DatasetRecord> =
        records.iter().map(|r| (r.key(), r)).collect();
    let mut per_sample: BTreeMap<&str, Vec<&AnnotationRecord>> = BTreeMap::new();
    for note in notes {
        per_sample.entry(note.sample_id.as_str()).or_default().push(note);
    }

    let with_summary: Vec<&Vec<&AnnotationRecord>> = per_sample
        .values()
        .filter(|group| group.iter().any(|n| n.summary_correct.is_some()))
        .collect();
    let summary_all_correct_ratio = if with_summary.is_empty() {
        None
    } else {
        let all_correct = with_summary
            .iter()
            .filter(|group| group.iter().filter_map(|n| n.summary_correct).all(|c| c))
            .count();
        Some(all_correct as f64 / with_summary.len() as f64)
    };

    let votes: Vec<Vec<bool>> = per_sample
        .values()
        .map(|group| group.iter().filter_map(|n| n.relevant).collect::<Vec<bool>>())
        .filter(|v| v.len() >= 2)
        .collect();
    let relevancy = if votes.is_empty() { None } else { Some(relevancy_agreement(&votes)?) };

    let relevant_groups: Vec<&Vec<&AnnotationRecord>> = per_sample
        .values()
        .filter(|group| group.len() >= 2 && group.iter().all(|n| n.relevant == Some(true)))
        .collect();
    let kappa_sentiment = kappa_from_groups(&relevant_groups, |n| {
        simplify_sentiment(n).ok().map(|s| s.index())
    });
    let kappa_aspect = kappa_from_groups(&relevant_groups, |n| {
        n.most_relevant_aspect
            .or_else(|| {
                (n.aspects_selected.len() == 1)
                    .then(|| *n.aspects_selected.iter().next().unwrap())
            })
            .map(|a| a.index())
    });

    let mut model_sentiments: Vec<Option<Sentiment>> = Vec::new();
    let mut gold_sentiments: Vec<Option<Sentiment>> = Vec::new();
    let mut model_aspects: Vec<Option<Aspect>> = Vec::new();
    let mut gold_aspects: Vec<Option<Aspect>> = Vec::new();
    let mut relevance_samples: Vec<(u8, bool)> = Vec::new();
    for (sample_id, group) in &per_sample {
        let Some(record) = by_key.get(*sample_id) else {
            continue;
        };
        let simplified: Vec<Sentiment> =
            group.iter().filter_map(|n| simplify_sentiment(n).ok()).collect();
        model_sentiments.push(Some(record.sentiment));
        gold_sentiments.push(if simplified.is_empty() {
            None
        } else {
            Some(majority_sentiment(&simplified)?)
        });
        let owned: Vec<AnnotationRecord> = group.iter().map(|n| (*n).clone()).collect();
        model_aspects.push(Some(record.aspect));
        gold_aspects.push(aggregate_aspect(&owned).ok().map(|a| a.aspect));
        let any_irrelevant = group.iter().any(|n| n.relevant == Some(false));
        relevance_samples.push((record.relevance_score, any_irrelevant));
    }
    let sentiment_accuracy = (!model_sentiments.is_empty())
        .then(|| accuracy(&model_sentiments, &gold_sentiments))
        .transpose()?
        .map(|a| a.accuracy);
    let aspect_accuracy = (!model_aspects.is_empty())
        .then(|| accuracy(&model_aspects, &gold_aspects))
        .transpose()?
        .map(|a| a.accuracy);

    Ok(EvaluationSummary {
        summary_all_correct_ratio,
        relevancy,
        kappa_sentiment,
        kappa_aspect,
        sentiment_accuracy,
        aspect_accuracy,
        relevance_table: relevance_agreement_table(&relevance_samples),
    })
}

/// Per model-score bucket: how many evaluation samples at that score were
/// marked irrelevant by at least one annotator. Empty buckets are omitted.
pub fn relevance_agreement_table(samples: &[(u8, bool)]) -> Vec<RelevanceAgreementRow> {
    let mut buckets: BTreeMap<u8, (u64, u64)> = BTreeMap::new();
    for &(score, flagged) in samples {
        let e = buckets.entry(score).or_insert((0, 0));
        e.1 += 1;
        if flagged {
            e.0 += 1;
        }
    }
    buckets
        .into_iter()
        .map(|(score, (flagged, total))| RelevanceAgreementRow {
            score,
            flagged,
            total,
            ratio: flagged as f64 / total as f64,
        })
        .collect()
}
