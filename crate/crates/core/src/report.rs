//! CSV report emitters for the analysis commands.

use std::path::Path;

use crate::analytics::{self, DatasetStats};
use crate::dataset::DatasetRecord;
use crate::error::Result;
use crate::evaluation::EvaluationSummary;
use crate::topics::TopicSummary;
use crate::types::ASPECTS;

/// Totals and macro-averaged per-company ratios, one row each.
pub fn write_stats_csv(path: impl AsRef<Path>, stats: &DatasetStats) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["row", "negative", "neutral", "positive", "E", "S", "G"])?;
    w.write_record([
        "total".to_string(),
        stats.sentiment_totals[0].to_string(),
        stats.sentiment_totals[1].to_string(),
        stats.sentiment_totals[2].to_string(),
        stats.aspect_totals[0].to_string(),
        stats.aspect_totals[1].to_string(),
        stats.aspect_totals[2].to_string(),
    ])?;
    let fmt = |v: f64| format!("{v:.4}");
    w.write_record([
        "avg_ratio_per_company".to_string(),
        fmt(stats.macro_sentiment_ratios[0]),
        fmt(stats.macro_sentiment_ratios[1]),
        fmt(stats.macro_sentiment_ratios[2]),
        fmt(stats.macro_aspect_ratios[0]),
        fmt(stats.macro_aspect_ratios[1]),
        fmt(stats.macro_aspect_ratios[2]),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn write_company_totals_csv(path: impl AsRef<Path>, stats: &DatasetStats) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record([
        "company", "count", "negative", "neutral", "positive", "E", "S", "G", "ratio_E",
        "ratio_S", "ratio_G",
    ])?;
    for (company, c) in &stats.per_company {
        let ar = c.aspect_ratios();
        w.write_record([
            company.clone(),
            c.count.to_string(),
            c.sentiment_counts[0].to_string(),
            c.sentiment_counts[1].to_string(),
            c.sentiment_counts[2].to_string(),
            c.aspect_counts[0].to_string(),
            c.aspect_counts[1].to_string(),
            c.aspect_counts[2].to_string(),
            format!("{:.4}", ar[0]),
            format!("{:.4}", ar[1]),
            format!("{:.4}", ar[2]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_weekly_csv(path: impl AsRef<Path>, records: &[DatasetRecord]) -> Result<()> {
    let weeks = analytics::weekly_counts(records);
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["iso_year", "iso_week", "total", "E", "S", "G"])?;
    for b in weeks {
        w.write_record([
            b.year.to_string(),
            b.week.to_string(),
            b.total.to_string(),
            b.per_aspect[0].to_string(),
            b.per_aspect[1].to_string(),
            b.per_aspect[2].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_moving_average_csv(
    path: impl AsRef<Path>,
    records: &[DatasetRecord],
    window_days: u32,
) -> Result<()> {
    let series = analytics::sentiment_moving_average(records, window_days);
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["aspect", "date", "moving_average"])?;
    for aspect in ASPECTS {
        if let Some(points) = series.get(&aspect) {
            for p in points {
                w.write_record([
                    aspect.label().to_string(),
                    p.date.to_string(),
                    format!("{:.6}", p.value),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_relevance_csv(path: impl AsRef<Path>, records: &[DatasetRecord]) -> Result<()> {
    let histogram = analytics::relevance_histogram(records)?;
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["score", "count"])?;
    for (i, count) in histogram.counts.iter().enumerate() {
        w.write_record([(i + 1).to_string(), count.to_string()])?;
    }
    w.write_record(["mean".to_string(), format!("{:.4}", histogram.mean)])?;
    w.flush()?;
    Ok(())
}

pub fn write_topics_csv(path: impl AsRef<Path>, company: &str, topics: &[TopicSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["company", "topic_id", "members", "mean_relevance", "mean_sentiment", "top_terms"])?;
    for t in topics {
        let terms: Vec<String> = t.top_terms.iter().map(|(term, _)| term.clone()).collect();
        w.write_record([
            company.to_string(),
            t.topic_id.to_string(),
            t.member_keys.len().to_string(),
            format!("{:.3}", t.mean_relevance),
            format!("{:.3}", t.mean_sentiment),
            terms.join(" "),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_topic_monthly_csv(path: impl AsRef<Path>, topics: &[TopicSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record([
        "topic_id", "year", "month", "pos_E", "pos_S", "pos_G", "neg_E", "neg_S", "neg_G",
    ])?;
    for t in topics {
        for m in &t.monthly {
            w.write_record([
                t.topic_id.to_string(),
                m.year.to_string(),
                m.month.to_string(),
                m.positive[0].to_string(),
                m.positive[1].to_string(),
                m.positive[2].to_string(),
                m.negative[0].to_string(),
                m.negative[1].to_string(),
                m.negative[2].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Plain-text rendering of the evaluation metrics.
pub fn format_eval_text(report: &EvaluationSummary) -> String {
    let mut out = String::new();
    if let Some(v) = report.summary_all_correct_ratio {
        out.push_str(&format!("summary correct by all annotators: {:.1}%\n", v * 100.0));
    }
    if let Some(r) = &report.relevancy {
        out.push_str(&format!(
            "relevancy agreement over {} samples: all={:.1}% majority={:.1}% any={:.1}%\n",
            r.samples,
            r.all * 100.0,
            r.majority * 100.0,
            r.any * 100.0
        ));
    }
    if let Some(v) = report.kappa_sentiment {
        out.push_str(&format!("fleiss kappa (sentiment, relevant-by-all): {v:.3}\n"));
    }
    if let Some(v) = report.kappa_aspect {
        out.push_str(&format!("fleiss kappa (aspect, relevant-by-all): {v:.3}\n"));
    }
    if let Some(v) = report.sentiment_accuracy {
        out.push_str(&format!("sentiment accuracy vs aggregated gold: {:.1}%\n", v * 100.0));
    }
    if let Some(v) = report.aspect_accuracy {
        out.push_str(&format!("aspect accuracy vs aggregated gold: {:.1}%\n", v * 100.0));
    }
    if !report.relevance_table.is_empty() {
        out.push_str("irrelevant-by-at-least-one per model relevance score:\n");
        for row in &report.relevance_table {
            out.push_str(&format!(
                "  score {:>2}: {}/{} ({:.2})\n",
                row.score, row.flagged, row.total, row.ratio
            ));
        }
    }
    out
}

pub fn write_eval_csv(path: impl AsRef<Path>, report: &EvaluationSummary) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["metric", "value"])?;
    let fmt = |v: f64| format!("{v:.4}");
    if let Some(v) = report.summary_all_correct_ratio {
        w.write_record(["summary_all_correct_ratio".to_string(), fmt(v)])?;
    }
    if let Some(r) = &report.relevancy {
        w.write_record(["relevant_by_all".to_string(), fmt(r.all)])?;
        w.write_record(["relevant_by_majority".to_string(), fmt(r.majority)])?;
        w.write_record(["relevant_by_any".to_string(), fmt(r.any)])?;
    }
    if let Some(v) = report.kappa_sentiment {
        w.write_record(["fleiss_kappa_sentiment".to_string(), fmt(v)])?;
    }
    if let Some(v) = report.kappa_aspect {
        w.write_record(["fleiss_kappa_aspect".to_string(), fmt(v)])?;
    }
    if let Some(v) = report.sentiment_accuracy {
        w.write_record(["sentiment_accuracy".to_string(), fmt(v)])?;
    }
    if let Some(v) = report.aspect_accuracy {
        w.write_record(["aspect_accuracy".to_string(), fmt(v)])?;
    }
    for row in &report.relevance_table {
        w.write_record([
            format!("irrelevant_by_one_at_score_{}", row.score),
            format!("{}/{} ({:.2})", row.flagged, row.total, row.ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}
