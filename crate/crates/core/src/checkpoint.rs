//! Append-only line-delimited checkpoints with resume support.
//!
//! Every stage writes one JSON record per processed item, flushed per line;
//! a re-run loads the done-set and skips completed work, so an interrupted
//! stage resumes to a byte-identical file.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub struct JsonlWriter {
    writer: BufWriter<File>,
}

impl JsonlWriter {
    pub fn append(path: impl AsRef<Path>) -> Result<Self> {
        if let Some(parent) = path.as_ref().parent() {
            std::fs::create_dir_all(parent)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(path.as_ref())?;
        Ok(JsonlWriter { writer: BufWriter::new(file) })
    }

    /// Write one record and flush it; a crash never loses acknowledged
    /// lines.
    pub fn write<T: Serialize>(&mut self, record: &T) -> Result<()> {
        serde_json::to_writer(&mut self.writer, record)?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()?;
        Ok(())
    }
}

pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| {
        Error::config(format!("cannot open checkpoint {}: {e}", path.display()))
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(&line).map_err(|e| Error::Record {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Ids already present in a keyed checkpoint; empty when the file does not
/// exist yet.
pub fn done_keys<T: DeserializeOwned, F: Fn(&T) -> String>(
    path: impl AsRef<Path>,
    key: F,
) -> Result<BTreeSet<String>> {
    if !path.as_ref().exists() {
        return Ok(BTreeSet::new());
    }
    Ok(read_jsonl::<T>(path)?.iter().map(key).collect())
}

/// Per-stage volume accounting.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StageReport {
    pub stage: String,
    pub input_count: u64,
    pub output_count: u64,
    /// 1 − output/input for this stage.
    pub reduction_vs_previous: f64,
    /// 1 − output/start, start being the pipeline's initial input count.
    pub reduction_vs_start: f64,
}

impl StageReport {
    pub fn new(stage: &str, input: u64, output: u64, start: u64) -> Self {
        let frac = |num: u64, den: u64| if den == 0 { 0.0 } else { 1.0 - num as f64 / den as f64 };
        StageReport {
            stage: stage.to_string(),
            input_count: input,
            output_count: output,
            reduction_vs_previous: frac(output, input),
            reduction_vs_start: frac(output, start),
        }
    }
}

/// Stage reports are keyed by stage name; re-running a stage replaces its
/// row.
pub struct ReportLog {
    path: PathBuf,
}

impl ReportLog {
    pub fn new(workdir: impl AsRef<Path>) -> Self {
        ReportLog { path: workdir.as_ref().join("stage_reports.jsonl") }
    }

    pub fn record(&self, report: &StageReport) -> Result<()> {
        let mut all = self.read_all()?;
        all.retain(|r| r.stage != report.stage);
        all.push(report.clone());
        let mut w = BufWriter::new(File::create(&self.path)?);
        for r in &all {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_all(&self) -> Result<Vec<StageReport>> {
        if !self.path.exists() {
            return Ok(Vec::new());
        }
        read_jsonl(&self.path)
    }

    pub fn get(&self, stage: &str) -> Result<Option<StageReport>> {
        Ok(self.read_all()?.into_iter().find(|r| r.stage == stage))
    }
}

/// Run `f` over the not-yet-done items on `workers` threads while emitting
/// results in input order. Output order (and so checkpoint bytes) is
/// independent of scheduling.
pub fn ordered_parallel_map<I, O, F>(items: Vec<I>, workers: usize, f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync,
{
    if items.is_empty() {
        return Vec::new();
    }
    let workers = workers.max(1).min(items.len());
    if workers == 1 {
        return items.iter().map(&f).collect();
    }
    let n = items.len();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<std::sync::Mutex<Option<O>>> = Vec::with_capacity(n);
    slots.resize_with(n, || std::sync::Mutex::new(None));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if idx >= n {
                    break;
                }
                let out = f(&items[idx]);
                *slots[idx].lock().unwrap() = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}
