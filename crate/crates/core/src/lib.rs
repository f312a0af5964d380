//! Batch pipeline engine and analysis toolkit for extracting corporate
//! sustainability (ESG) signals from news-article corpora.
//!
//! The pipeline stages are: ingest (keyword matching), paragraph
//! deduplication, entity-based filtering, a cheap LLM relevance filter,
//! summary deduplication and the final determination, followed by optional
//! translation. Analysis covers dataset statistics, time series, topic
//! detection and annotation evaluation.

pub mod analytics;
pub mod checkpoint;
pub mod config;
pub mod corpus;
pub mod dataset;
pub mod dedup;
pub mod entity_filter;
pub mod error;
pub mod evaluation;
pub mod llm;
pub mod plot;
pub mod pipeline;
pub mod providers;
pub mod report;
pub mod synthetic;
pub mod topics;
pub mod types;

pub use error::{Error, Result};
