//! C ABI over the analysis kernels: cosine similarity, near-duplicate
//! detection, Fleiss' kappa, sentiment simplification and dataset
//! statistics.
//!
//! Conventions: every fallible function returns an [`EsgStatus`] code and
//! writes its result through out-pointers; `esg_last_error_message` returns
//! the detail of the most recent error on the calling thread; strings and
//! handles returned by the library are freed with `esg_string_free` /
//! `esg_dataset_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;

use chrono::{DateTime, Utc};
use esgpipe::dataset::DatasetRecord;
use esgpipe::dedup::{cosine_similarity, dedup_stream, DedupConfig, DedupItem};
use esgpipe::evaluation::{fleiss_kappa, AgreementMatrix, KappaOutcome};
use esgpipe::providers::EmbeddingVector;
use esgpipe::types::Sentiment;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Utf8Error = 3,
    IoError = 4,
    ParseError = 5,
    /// The requested statistic is undefined for this input (for example
    /// Fleiss' kappa when all votes fall into one category).
    Degenerate = 6,
    InternalError = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn fail(status: EsgStatus, message: impl Into<String>) -> EsgStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message.into()));
    status
}

fn ok() -> EsgStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    EsgStatus::Ok
}

/// Library version as a static string; never freed.
#[no_mangle]
pub extern "C" fn esg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Detail message for the most recent error on this thread, or NULL when
/// the last call succeeded. Free with `esg_string_free`.
#[no_mangle]
pub extern "C" fn esg_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_deref() {
        Some(message) => CString::new(message)
            .map(CString::into_raw)
            .unwrap_or(std::ptr::null_mut()),
        None => std::ptr::null_mut(),
    })
}

/// Free a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn esg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Cosine similarity of two equal-length vectors.
///
/// # Safety
/// `a` and `b` must point to `len` readable doubles; `out` must be a valid
/// write target.
#[no_mangle]
pub unsafe extern "C" fn esg_cosine_similarity(
    a: *const f64,
    b: *const f64,
    len: usize,
    out: *mut f64,
) -> EsgStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return fail(EsgStatus::NullPointer, "null pointer argument");
    }
    if len == 0 {
        return fail(EsgStatus::InvalidArgument, "zero-length vectors");
    }
    let a = std::slice::from_raw_parts(a, len);
    let b = std::slice::from_raw_parts(b, len);
    let (Ok(va), Ok(vb)) = (
        EmbeddingVector::new(a.to_vec()),
        EmbeddingVector::new(b.to_vec()),
    ) else {
        return fail(EsgStatus::InvalidArgument, "vectors must be finite");
    };
    match cosine_similarity(&va, &vb) {
        Ok(v) => {
            *out = v;
            ok()
        }
        Err(e) => fail(EsgStatus::InvalidArgument, e.to_string()),
    }
}

/// Fleiss' kappa over a row-major `subjects x categories` vote-count
/// matrix (constant rater count per subject).
///
/// # Safety
/// `counts` must point to `subjects * categories` readable u64 values;
/// `out` must be a valid write target.
#[no_mangle]
pub unsafe extern "C" fn esg_fleiss_kappa(
    counts: *const u64,
    subjects: usize,
    categories: usize,
    out: *mut f64,
) -> EsgStatus {
    if counts.is_null() || out.is_null() {
        return fail(EsgStatus::NullPointer, "null pointer argument");
    }
    if subjects == 0 || categories == 0 {
        return fail(EsgStatus::InvalidArgument, "empty matrix");
    }
    let flat = std::slice::from_raw_parts(counts, subjects * categories);
    let rows: Vec<Vec<u64>> = flat.chunks(categories).map(|c| c.to_vec()).collect();
    let matrix = match AgreementMatrix::new(rows) {
        Ok(m) => m,
        Err(e) => return fail(EsgStatus::InvalidArgument, e.to_string()),
    };
    match fleiss_kappa(&matrix) {
        KappaOutcome::Value(v) => {
            *out = v;
            ok()
        }
        KappaOutcome::Degenerate => fail(
            EsgStatus::Degenerate,
            "kappa undefined: all votes in one category",
        ),
    }
}

/// Collapse a multi-select sentiment annotation to one value. The result
/// is written as -1 (negative), 0 (neutral) or +1 (positive).
///
/// # Safety
/// `out` must be a valid write target.
#[no_mangle]
pub unsafe extern "C" fn esg_simplify_sentiment(
    negative: bool,
    neutral: bool,
    positive: bool,
    not_sure: bool,
    out: *mut i32,
) -> EsgStatus {
    if out.is_null() {
        return fail(EsgStatus::NullPointer, "null out pointer");
    }
    let mut record = esgpipe::evaluation::AnnotationRecord {
        annotator_id: String::new(),
        sample_id: String::new(),
        not_sure,
        ..Default::default()
    };
    if negative {
        record.sentiments_selected.insert(Sentiment::Negative);
    }
    if neutral {
        record.sentiments_selected.insert(Sentiment::Neutral);
    }
    if positive {
        record.sentiments_selected.insert(Sentiment::Positive);
    }
    match esgpipe::evaluation::simplify_sentiment(&record) {
        Ok(s) => {
            *out = s.value() as i32;
            ok()
        }
        Err(e) => fail(EsgStatus::InvalidArgument, e.to_string()),
    }
}

/// Greedy near-duplicate pass over one embedding per item. `vectors` is
/// row-major `items x dim`; `timestamps` are unix seconds; `kept_out[i]`
/// receives whether item `i` survives.
///
/// # Safety
/// `vectors` must hold `items * dim` doubles, `timestamps` `items` values
/// and `kept_out` room for `items` booleans.
#[no_mangle]
pub unsafe extern "C" fn esg_dedup_flat(
    vectors: *const f64,
    items: usize,
    dim: usize,
    timestamps: *const i64,
    similarity_threshold: f64,
    window_days: f64,
    kept_out: *mut bool,
) -> EsgStatus {
    if vectors.is_null() || timestamps.is_null() || kept_out.is_null() {
        return fail(EsgStatus::NullPointer, "null pointer argument");
    }
    if items == 0 || dim == 0 {
        return fail(EsgStatus::InvalidArgument, "empty input");
    }
    let flat = std::slice::from_raw_parts(vectors, items * dim);
    let stamps = std::slice::from_raw_parts(timestamps, items);
    let mut dedup_items = Vec::with_capacity(items);
    for i in 0..items {
        let vector = match EmbeddingVector::new(flat[i * dim..(i + 1) * dim].to_vec()) {
            Ok(v) => v,
            Err(e) => return fail(EsgStatus::InvalidArgument, e.to_string()),
        };
        let Some(timestamp) = DateTime::<Utc>::from_timestamp(stamps[i], 0) else {
            return fail(EsgStatus::InvalidArgument, format!("timestamp {} out of range", stamps[i]));
        };
        dedup_items.push(DedupItem {
            // Zero-padded ids keep tie-breaking aligned with input order.
            id: format!("{i:010}"),
            timestamp,
            vectors: vec![vector],
        });
    }
    let cfg = DedupConfig {
        similarity_threshold,
        window_days,
        ..Default::default()
    };
    let outcome = match dedup_stream(&dedup_items, &cfg) {
        Ok(o) => o,
        Err(e) => return fail(EsgStatus::InvalidArgument, e.to_string()),
    };
    let kept = std::slice::from_raw_parts_mut(kept_out, items);
    for (i, slot) in kept.iter_mut().enumerate() {
        *slot = outcome.is_kept(&format!("{i:010}"));
    }
    ok()
}

/// Opaque handle over a loaded dataset.
pub struct EsgDataset {
    records: Vec<DatasetRecord>,
}

/// Load a dataset file (`.jsonl` or `.csv` in the determination-checkpoint
/// column set) into an opaque handle.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` a valid write
/// target. The handle must be freed with `esg_dataset_free`.
#[no_mangle]
pub unsafe extern "C" fn esg_dataset_load(
    path: *const c_char,
    out: *mut *mut EsgDataset,
) -> EsgStatus {
    if path.is_null() || out.is_null() {
        return fail(EsgStatus::NullPointer, "null pointer argument");
    }
    let Ok(path) = CStr::from_ptr(path).to_str() else {
        return fail(EsgStatus::Utf8Error, "path is not valid UTF-8");
    };
    match esgpipe::dataset::load_dataset(path) {
        Ok(records) => {
            *out = Box::into_raw(Box::new(EsgDataset { records }));
            ok()
        }
        Err(esgpipe::Error::MissingInput(p)) => {
            fail(EsgStatus::IoError, format!("missing input {}", p.display()))
        }
        Err(esgpipe::Error::Io(e)) => fail(EsgStatus::IoError, e.to_string()),
        Err(e) => fail(EsgStatus::ParseError, e.to_string()),
    }
}

/// Number of records in a dataset handle; 0 for NULL.
///
/// # Safety
/// `ds` must be a live handle from `esg_dataset_load` or NULL.
#[no_mangle]
pub unsafe extern "C" fn esg_dataset_len(ds: *const EsgDataset) -> usize {
    if ds.is_null() {
        return 0;
    }
    (*ds).records.len()
}

/// Aggregate statistics (totals, per-company counts, macro ratios) as a
/// JSON document. Free the string with `esg_string_free`.
///
/// # Safety
/// `ds` must be a live handle; `out` a valid write target.
#[no_mangle]
pub unsafe extern "C" fn esg_dataset_stats_json(
    ds: *const EsgDataset,
    out: *mut *mut c_char,
) -> EsgStatus {
    if ds.is_null() || out.is_null() {
        return fail(EsgStatus::NullPointer, "null pointer argument");
    }
    let stats = esgpipe::analytics::aggregate_counts(&(*ds).records);
    let json = match serde_json::to_string(&stats) {
        Ok(j) => j,
        Err(e) => return fail(EsgStatus::InternalError, e.to_string()),
    };
    match CString::new(json) {
        Ok(s) => {
            *out = s.into_raw();
            ok()
        }
        Err(e) => fail(EsgStatus::InternalError, e.to_string()),
    }
}

/// Relevance-score histogram: `counts_out` receives counts for scores
/// 1..=10, `mean_out` the mean score.
///
/// # Safety
/// `ds` must be a live handle; `counts_out` must have room for 10 values;
/// `mean_out` must be a valid write target.
#[no_mangle]
pub unsafe extern "C" fn esg_dataset_relevance_histogram(
    ds: *const EsgDataset,
    counts_out: *mut u64,
    mean_out: *mut f64,
) -> EsgStatus {
    if ds.is_null() || counts_out.is_null() || mean_out.is_null() {
        return fail(EsgStatus::NullPointer, "null pointer argument");
    }
    match esgpipe::analytics::relevance_histogram(&(*ds).records) {
        Ok(histogram) => {
            let out = std::slice::from_raw_parts_mut(counts_out, 10);
            out.copy_from_slice(&histogram.counts);
            *mean_out = histogram.mean;
            ok()
        }
        Err(e) => fail(EsgStatus::InvalidArgument, e.to_string()),
    }
}

/// Free a dataset handle. NULL is a no-op.
///
/// # Safety
/// `ds` must come from `esg_dataset_load` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn esg_dataset_free(ds: *mut EsgDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}
