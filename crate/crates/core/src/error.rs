//! Error type shared across the pipeline.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}:{line}: invalid record: {message}")]
    Record {
        path: String,
        line: usize,
        message: String,
    },

    #[error("provider `{provider}`: {message}")]
    Provider { provider: String, message: String },

    #[error("response parse: {0}")]
    Parse(String),

    #[error("validation: {0}")]
    Validation(String),

    #[error("embedding dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("zero-norm embedding vector")]
    ZeroNorm,

    #[error("stage `{stage}` requires the checkpoint of `{predecessor}`; run `{predecessor}` first")]
    MissingCheckpoint { stage: String, predecessor: String },

    #[error("missing input: {0}")]
    MissingInput(PathBuf),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn provider(provider: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Provider {
            provider: provider.into(),
            message: msg.into(),
        }
    }
}
