//! The released-dataset record format: one line per (company, article)
//! determination with `{company, url, published_at, summary, summary_en,
//! sentiment, aspect, relevance_score, keywords}`.
//!
//! JSONL is the native checkpoint format; CSV import/export is provided for
//! interoperability with spreadsheet-style exports (keywords joined with
//! `;`, sentiment/aspect accepted through the alias tables).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llm::parse::{parse_aspect, parse_sentiment};
use crate::types::{Aspect, Sentiment};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub company: String,
    pub url: String,
    pub published_at: DateTime<Utc>,
    pub summary: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_en: Option<String>,
    pub sentiment: Sentiment,
    pub aspect: Aspect,
    pub relevance_score: u8,
    pub keywords: Vec<String>,
}

impl DatasetRecord {
    /// Stable record key: one article can appear once per company.
    pub fn key(&self) -> String {
        format!("{}::{}", self.company, self.url)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=10).contains(&self.relevance_score) {
            return Err(Error::validation(format!(
                "record {} has relevance score {} outside 1-10",
                self.key(),
                self.relevance_score
            )));
        }
        Ok(())
    }
}

/// Load a dataset from `.jsonl`/`.ndjson` or `.csv`, chosen by extension.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<DatasetRecord>> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingInput(path.to_path_buf()));
    }
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let records = match ext {
        "csv" => load_csv(path)?,
        _ => load_jsonl(path)?,
    };
    for r in &records {
        r.validate()?;
    }
    Ok(records)
}

fn load_jsonl(path: &Path) -> Result<Vec<DatasetRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DatasetRecord = serde_json::from_str(&line).map_err(|e| Error::Record {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_jsonl(path: impl AsRef<Path>, records: &[DatasetRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

const CSV_HEADERS: [&str; 9] = [
    "company",
    "url",
    "published_at",
    "summary",
    "summary_en",
    "sentiment",
    "aspect",
    "relevance_score",
    "keywords",
];

fn load_csv(path: &Path) -> Result<Vec<DatasetRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let index = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::validation(format!("dataset csv missing column `{name}`")))
    };
    let col_company = index("company")?;
    let col_url = index("url")?;
    let col_published = index("published_at")?;
    let col_summary = index("summary")?;
    let col_summary_en = headers.iter().position(|h| h == "summary_en");
    let col_sentiment = index("sentiment")?;
    let col_aspect = index("aspect")?;
    let col_score = index("relevance_score")?;
    let col_keywords = headers.iter().position(|h| h == "keywords");

    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let mk_err = |message: String| Error::Record {
            path: path.display().to_string(),
            line: i + 2,
            message,
        };
        let published_at = DateTime::parse_from_rfc3339(&row[col_published])
            .map_err(|e| mk_err(format!("published_at: {e}")))?
            .with_timezone(&Utc);
        let sentiment =
            parse_sentiment(&row[col_sentiment]).map_err(|e| mk_err(e.to_string()))?;
        let aspect = parse_aspect(&row[col_aspect]).map_err(|e| mk_err(e.to_string()))?;
        let relevance_score: u8 = row[col_score]
            .trim()
            .parse()
            .map_err(|e| mk_err(format!("relevance_score: {e}")))?;
        let summary_en = col_summary_en
            .map(|c| row[c].to_string())
            .filter(|s| !s.is_empty());
        let keywords = col_keywords
            .map(|c| {
                row[c]
                    .split(';')
                    .map(|k| k.trim().to_string())
                    .filter(|k| !k.is_empty())
                    .collect()
            })
            .unwrap_or_default();
        out.push(DatasetRecord {
            company: row[col_company].to_string(),
            url: row[col_url].to_string(),
            published_at,
            summary: row[col_summary].to_string(),
            summary_en,
            sentiment,
            aspect,
            relevance_score,
            keywords,
        });
    }
    Ok(out)
}

pub fn write_csv(path: impl AsRef<Path>, records: &[DatasetRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(CSV_HEADERS)?;
    for r in records {
        writer.write_record([
            r.company.as_str(),
            r.url.as_str(),
            &r.published_at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            r.summary.as_str(),
            r.summary_en.as_deref().unwrap_or(""),
            r.sentiment.label(),
            r.aspect.label(),
            &r.relevance_score.to_string(),
            &r.keywords.join(";"),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
