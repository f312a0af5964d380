//! Core label enums used throughout the pipeline.

use serde::{Deserialize, Serialize};

/// Polarity of the sustainability information about the target company.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sentiment {
    Negative,
    Neutral,
    Positive,
}

pub const SENTIMENTS: [Sentiment; 3] = [Sentiment::Negative, Sentiment::Neutral, Sentiment::Positive];

impl Sentiment {
    /// Numeric mapping used by all time-series aggregation: −1 / 0 / +1.
    pub fn value(self) -> f64 {
        match self {
            Sentiment::Negative => -1.0,
            Sentiment::Neutral => 0.0,
            Sentiment::Positive => 1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Sentiment::Negative => 0,
            Sentiment::Neutral => 1,
            Sentiment::Positive => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sentiment::Negative => "negative",
            Sentiment::Neutral => "neutral",
            Sentiment::Positive => "positive",
        }
    }
}

impl std::fmt::Display for Sentiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// The sustainability category an article is assigned to.
///
/// Ordering (E < S < G) is load-bearing: it is the documented residual
/// tie-break order for aspect aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Aspect {
    E,
    S,
    G,
}

pub const ASPECTS: [Aspect; 3] = [Aspect::E, Aspect::S, Aspect::G];

impl Aspect {
    pub fn index(self) -> usize {
        match self {
            Aspect::E => 0,
            Aspect::S => 1,
            Aspect::G => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Aspect::E => "E",
            Aspect::S => "S",
            Aspect::G => "G",
        }
    }
}

impl std::fmt::Display for Aspect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}
