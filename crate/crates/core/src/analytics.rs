//! Dataset statistics: sentiment/aspect totals and per-company macro
//! averages, weekly counts, moving-average sentiment series and the
//! relevance-score histogram.
//!
//! Sentiment enters all numeric aggregation through the {−1, 0, +1}
//! mapping of [`Sentiment::value`].

use std::collections::BTreeMap;

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde::Serialize;

use crate::dataset::DatasetRecord;
use crate::error::{Error, Result};
use crate::types::{Aspect, ASPECTS};

#[derive(Debug, Clone, Default, Serialize)]
pub struct CompanyStats {
    pub count: u64,
    pub sentiment_counts: [u64; 3],
    pub aspect_counts: [u64; 3],
}

impl CompanyStats {
    pub fn sentiment_ratios(&self) -> [f64; 3] {
        ratios(&self.sentiment_counts, self.count)
    }

    pub fn aspect_ratios(&self) -> [f64; 3] {
        ratios(&self.aspect_counts, self.count)
    }
}

fn ratios(counts: &[u64; 3], total: u64) -> [f64; 3] {
    if total == 0 {
        return [0.0; 3];
    }
    [
        counts[0] as f64 / total as f64,
        counts[1] as f64 / total as f64,
        counts[2] as f64 / total as f64,
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetStats {
    pub total: u64,
    /// Indexed by [`Sentiment::index`]: negative, neutral, positive.
    pub sentiment_totals: [u64; 3],
    /// Indexed by [`Aspect::index`]: E, S, G.
    pub aspect_totals: [u64; 3],
    pub per_company: BTreeMap<String, CompanyStats>,
    /// Unweighted mean over companies of each company's sentiment ratios.
    pub macro_sentiment_ratios: [f64; 3],
    /// Unweighted mean over companies of each company's aspect ratios.
    pub macro_aspect_ratios: [f64; 3],
}

/// Group records per company and derive totals plus macro-averaged ratios.
pub fn company_totals(records: &[DatasetRecord]) -> BTreeMap<String, CompanyStats> {
    let mut per_company: BTreeMap<String, CompanyStats> = BTreeMap::new();
    for r in records {
        let stats = per_company.entry(r.company.clone()).or_default();
        stats.count += 1;
        stats.sentiment_counts[r.sentiment.index()] += 1;
        stats.aspect_counts[r.aspect.index()] += 1;
    }
    per_company
}

pub fn aggregate_counts(records: &[DatasetRecord]) -> DatasetStats {
    let per_company = company_totals(records);
    let mut sentiment_totals = [0u64; 3];
    let mut aspect_totals = [0u64; 3];
    let mut macro_sentiment = [0.0; 3];
    let mut macro_aspect = [0.0; 3];
    for stats in per_company.values() {
        for i in 0..3 {
            sentiment_totals[i] += stats.sentiment_counts[i];
            aspect_totals[i] += stats.aspect_counts[i];
        }
        let sr = stats.sentiment_ratios();
        let ar = stats.aspect_ratios();
        for i in 0..3 {
            macro_sentiment[i] += sr[i];
            macro_aspect[i] += ar[i];
        }
    }
    let n_companies = per_company.len().max(1) as f64;
    for i in 0..3 {
        macro_sentiment[i] /= n_companies;
        macro_aspect[i] /= n_companies;
    }
    DatasetStats {
        total: records.len() as u64,
        sentiment_totals,
        aspect_totals,
        per_company,
        macro_sentiment_ratios: macro_sentiment,
        macro_aspect_ratios: macro_aspect,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeekBucket {
    /// ISO week-numbering year.
    pub year: i32,
    /// ISO week 1-53.
    pub week: u32,
    pub total: u64,
    pub per_aspect: [u64; 3],
}

fn iso_week_start(date: NaiveDate) -> NaiveDate {
    let iso = date.iso_week();
    NaiveDate::from_isoywd_opt(iso.year(), iso.week(), Weekday::Mon).expect("valid iso week")
}

/// Articles per ISO week, per aspect and in total. Weeks without articles
/// appear with count 0 within the dataset's date span.
pub fn weekly_counts(records: &[DatasetRecord]) -> Vec<WeekBucket> {
    if records.is_empty() {
        return Vec::new();
    }
    let mut buckets: BTreeMap<NaiveDate, WeekBucket> = BTreeMap::new();
    let mut min_date = NaiveDate::MAX;
    let mut max_date = NaiveDate::MIN;
    for r in records {
        let date = r.published_at.date_naive();
        min_date = min_date.min(date);
        max_date = max_date.max(date);
        let start = iso_week_start(date);
        let iso = date.iso_week();
        let bucket = buckets.entry(start).or_insert_with(|| WeekBucket {
            year: iso.year(),
            week: iso.week(),
            total: 0,
            per_aspect: [0; 3],
        });
        bucket.total += 1;
        bucket.per_aspect[r.aspect.index()] += 1;
    }
    // Zero-fill gaps over the span.
    let mut cursor = iso_week_start(min_date);
    let last = iso_week_start(max_date);
    while cursor <= last {
        let iso = cursor.iso_week();
        buckets.entry(cursor).or_insert_with(|| WeekBucket {
            year: iso.year(),
            week: iso.week(),
            total: 0,
            per_aspect: [0; 3],
        });
        cursor += Duration::days(7);
    }
    buckets.into_values().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DailyPoint {
    pub date: NaiveDate,
    pub value: f64,
}

/// Daily mean sentiment per aspect, smoothed with a trailing moving average
/// over `window_days` calendar days. The average uses only days with a
/// defined daily mean; days whose window holds no data yield no point.
pub fn sentiment_moving_average(
    records: &[DatasetRecord],
    window_days: u32,
) -> BTreeMap<Aspect, Vec<DailyPoint>> {
    let mut out = BTreeMap::new();
    if records.is_empty() || window_days == 0 {
        return out;
    }
    let min_date = records.iter().map(|r| r.published_at.date_naive()).min().unwrap();
    let max_date = records.iter().map(|r| r.published_at.date_naive()).max().unwrap();

    for aspect in ASPECTS {
        // (sum, count) of sentiment values per day.
        let mut daily: BTreeMap<NaiveDate, (f64, u64)> = BTreeMap::new();
        for r in records.iter().filter(|r| r.aspect == aspect) {
            let e = daily.entry(r.published_at.date_naive()).or_insert((0.0, 0));
            e.0 += r.sentiment.value();
            e.1 += 1;
        }
        if daily.is_empty() {
            continue;
        }
        let means: BTreeMap<NaiveDate, f64> =
            daily.into_iter().map(|(d, (sum, n))| (d, sum / n as f64)).collect();

        let mut series = Vec::new();
        let mut cursor = min_date;
        while cursor <= max_date {
            let window_start = cursor - Duration::days(window_days as i64 - 1);
            let window: Vec<f64> = means
                .range(window_start..=cursor)
                .map(|(_, v)| *v)
                .collect();
            if !window.is_empty() {
                series.push(DailyPoint {
                    date: cursor,
                    value: window.iter().sum::<f64>() / window.len() as f64,
                });
            }
            cursor += Duration::days(1);
        }
        out.insert(aspect, series);
    }
    out
}

/// Overall mean sentiment per aspect under the {−1, 0, +1} mapping.
/// Aspects with no records yield `None`.
pub fn overall_aspect_mean_sentiment(records: &[DatasetRecord]) -> [Option<f64>; 3] {
    let mut sums = [0.0; 3];
    let mut counts = [0u64; 3];
    for r in records {
        sums[r.aspect.index()] += r.sentiment.value();
        counts[r.aspect.index()] += 1;
    }
    let mut out = [None; 3];
    for i in 0..3 {
        if counts[i] > 0 {
            out[i] = Some(sums[i] / counts[i] as f64);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelevanceHistogram {
    /// counts[s-1] is the number of records with score s.
    pub counts: [u64; 10],
    pub mean: f64,
}

pub fn relevance_histogram(records: &[DatasetRecord]) -> Result<RelevanceHistogram> {
    let mut counts = [0u64; 10];
    let mut sum = 0u64;
    for r in records {
        if !(1..=10).contains(&r.relevance_score) {
            return Err(Error::validation(format!(
                "relevance score {} outside 1-10",
                r.relevance_score
            )));
        }
        counts[(r.relevance_score - 1) as usize] += 1;
        sum += r.relevance_score as u64;
    }
    let mean = if records.is_empty() { 0.0 } else { sum as f64 / records.len() as f64 };
    Ok(RelevanceHistogram { counts, mean })
}
