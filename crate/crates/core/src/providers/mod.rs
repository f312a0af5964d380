//! External-model contracts: embedding, zero-shot NER and chat.
//!
//! Each contract has an HTTP-backed implementation and a deterministic mock.
//! Providers are addressed by logical id (`embedder`, `ner`, `filter-chat`,
//! `final-chat`, `translate-chat`) so model choice stays a configuration
//! concern.

mod cache;
mod http;
mod mock;

pub use cache::{CachedChat, ResponseCache};
pub use http::{HttpChat, HttpEmbedder, HttpNer};
pub use mock::{markers, MockChat, MockEmbedder, MockNer, NerRule};

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-dimension real vector. All entries finite by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("embedding vector is empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("embedding vector has non-finite entries"));
        }
        Ok(EmbeddingVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// One recognized entity inside a sentence. Offsets are byte offsets into
/// the input, half-open.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySpan {
    pub text: String,
    pub label: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::Assistant, content: content.into() }
    }
}

/// Result of one chat call, with cache provenance.
#[derive(Debug, Clone)]
pub struct ChatExchange {
    pub provider_id: String,
    pub response: String,
    pub cache_hit: bool,
}

/// Validate the message-shape preconditions shared by all chat providers:
/// non-empty, ends with a user turn, no two consecutive assistant turns.
pub fn validate_messages(messages: &[ChatMessage]) -> Result<()> {
    let Some(last) = messages.last() else {
        return Err(Error::validation("chat called with no messages"));
    };
    if last.role != Role::User {
        return Err(Error::validation("chat messages must end with a user turn"));
    }
    for pair in messages.windows(2) {
        if pair[0].role == Role::Assistant && pair[1].role == Role::Assistant {
            return Err(Error::validation("two consecutive assistant turns"));
        }
    }
    Ok(())
}

pub trait Embedder: Send + Sync {
    fn id(&self) -> &str;

    /// One vector per input, same order, uniform dimension.
    fn embed_texts(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>>;
}

pub trait NerProvider: Send + Sync {
    fn id(&self) -> &str;

    /// Spans sorted by start offset; labels drawn from `candidate_labels`.
    fn entities(&self, sentence: &str, candidate_labels: &[String]) -> Result<Vec<EntitySpan>>;
}

pub trait ChatProvider: Send + Sync {
    fn id(&self) -> &str;

    fn chat(&self, messages: &[ChatMessage]) -> Result<ChatExchange>;
}

impl<T: Embedder + ?Sized> Embedder for std::sync::Arc<T> {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn embed_texts(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
        (**self).embed_texts(texts)
    }
}

impl<T: ChatProvider + ?Sized> ChatProvider for std::sync::Arc<T> {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn chat(&self, messages: &[ChatMessage]) -> Result<ChatExchange> {
        (**self).chat(messages)
    }
}

impl<T: NerProvider + ?Sized> NerProvider for std::sync::Arc<T> {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn entities(&self, sentence: &str, candidate_labels: &[String]) -> Result<Vec<EntitySpan>> {
        (**self).entities(sentence, candidate_labels)
    }
}

/// Simple per-run usage accounting: request counts and whitespace-token
/// volumes per direction, accumulated across all providers.
pub mod usage {
    use std::sync::atomic::{AtomicU64, Ordering};

    static REQUESTS: AtomicU64 = AtomicU64::new(0);
    static CACHE_HITS: AtomicU64 = AtomicU64::new(0);
    static PROMPT_TOKENS: AtomicU64 = AtomicU64::new(0);
    static RESPONSE_TOKENS: AtomicU64 = AtomicU64::new(0);

    fn approx_tokens(text: &str) -> u64 {
        text.split_whitespace().count() as u64
    }

    pub fn record_chat(messages: &[super::ChatMessage], response: &str) {
        REQUESTS.fetch_add(1, Ordering::Relaxed);
        let prompt: u64 = messages.iter().map(|m| approx_tokens(&m.content)).sum();
        PROMPT_TOKENS.fetch_add(prompt, Ordering::Relaxed);
        RESPONSE_TOKENS.fetch_add(approx_tokens(response), Ordering::Relaxed);
    }

    pub fn record_cache_hit() {
        CACHE_HITS.fetch_add(1, Ordering::Relaxed);
    }

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub struct Usage {
        pub requests: u64,
        pub cache_hits: u64,
        pub prompt_tokens: u64,
        pub response_tokens: u64,
    }

    pub fn snapshot() -> Usage {
        Usage {
            requests: REQUESTS.load(Ordering::Relaxed),
            cache_hits: CACHE_HITS.load(Ordering::Relaxed),
            prompt_tokens: PROMPT_TOKENS.load(Ordering::Relaxed),
            response_tokens: RESPONSE_TOKENS.load(Ordering::Relaxed),
        }
    }

    pub fn reset() {
        REQUESTS.store(0, Ordering::Relaxed);
        CACHE_HITS.store(0, Ordering::Relaxed);
        PROMPT_TOKENS.store(0, Ordering::Relaxed);
        RESPONSE_TOKENS.store(0, Ordering::Relaxed);
    }
}

/// Bounded retry with exponential backoff. Transport-level recovery only;
/// parse-level retries are handled by the protocol layer.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { attempts: 3, base_delay_ms: 1000 }
    }
}

impl RetryPolicy {
    pub fn run<T>(&self, mut op: impl FnMut() -> Result<T>) -> Result<T> {
        let attempts = self.attempts.max(1);
        let mut delay = Duration::from_millis(self.base_delay_ms);
        let mut last_err = None;
        for attempt in 0..attempts {
            match op() {
                Ok(v) => return Ok(v),
                Err(e) => {
                    log::warn!("provider attempt {}/{attempts} failed: {e}", attempt + 1);
                    last_err = Some(e);
                    if attempt + 1 < attempts {
                        std::thread::sleep(delay);
                        delay *= 2;
                    }
                }
            }
        }
        Err(last_err.expect("at least one attempt"))
    }
}

/// Per-provider request-rate ceiling: enforces a minimum interval between
/// calls across all threads sharing the provider.
#[derive(Debug)]
pub struct RateLimiter {
    min_interval: Duration,
    last: std::sync::Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(min_interval: Duration) -> Self {
        RateLimiter { min_interval, last: std::sync::Mutex::new(None) }
    }

    pub fn unlimited() -> Self {
        Self::new(Duration::ZERO)
    }

    pub fn wait(&self) {
        if self.min_interval.is_zero() {
            return;
        }
        let sleep_for = {
            let mut last = self.last.lock().unwrap();
            let now = Instant::now();
            let wait = match *last {
                Some(prev) => self.min_interval.saturating_sub(now - prev),
                None => Duration::ZERO,
            };
            *last = Some(now + wait);
            wait
        };
        if !sleep_for.is_zero() {
            std::thread::sleep(sleep_for);
        }
    }
}
