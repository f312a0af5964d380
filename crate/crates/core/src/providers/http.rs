//! HTTP-backed providers.
//!
//! Chat and embeddings speak the widely used OpenAI-compatible wire format;
//! NER posts `{text, labels}` to a GLiNER-style serving endpoint. API keys
//! come from environment variables named in the run config.

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};

use super::{
    validate_messages, ChatExchange, ChatMessage, ChatProvider, Embedder, EmbeddingVector,
    EntitySpan, NerProvider, RateLimiter, RetryPolicy, Role,
};

fn role_str(role: Role) -> &'static str {
    match role {
        Role::System => "system",
        Role::User => "user",
        Role::Assistant => "assistant",
    }
}

fn build_client() -> Result<reqwest::blocking::Client> {
    reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(120))
        .build()
        .map_err(|e| Error::provider("http", e.to_string()))
}

fn post_json(
    client: &reqwest::blocking::Client,
    provider: &str,
    url: &str,
    api_key: Option<&str>,
    body: &serde_json::Value,
) -> Result<serde_json::Value> {
    let mut req = client.post(url).json(body);
    if let Some(key) = api_key {
        req = req.bearer_auth(key);
    }
    let resp = req
        .send()
        .map_err(|e| Error::provider(provider, format!("transport: {e}")))?;
    let status = resp.status();
    let text = resp
        .text()
        .map_err(|e| Error::provider(provider, format!("body read: {e}")))?;
    if !status.is_success() {
        return Err(Error::provider(
            provider,
            format!("HTTP {status}: {}", text.chars().take(300).collect::<String>()),
        ));
    }
    serde_json::from_str(&text)
        .map_err(|e| Error::provider(provider, format!("invalid JSON response: {e}")))
}

pub struct HttpChat {
    id: String,
    endpoint: String,
    model: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
    retry: RetryPolicy,
    rate: RateLimiter,
}

impl HttpChat {
    pub fn new(
        id: impl Into<String>,
        base_url: &str,
        model: impl Into<String>,
        api_key: Option<String>,
    ) -> Result<Self> {
        Ok(HttpChat {
            id: id.into(),
            endpoint: format!("{}/chat/completions", base_url.trim_end_matches('/')),
            model: model.into(),
            api_key,
            client: build_client()?,
            retry: RetryPolicy::default(),
            rate: RateLimiter::unlimited(),
        })
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_rate(mut self, rate: RateLimiter) -> Self {
        self.rate = rate;
        self
    }
}

impl ChatProvider for HttpChat {
    fn id(&self) -> &str {
        &self.id
    }

    fn chat(&self, messages: &[ChatMessage]) -> Result<ChatExchange> {
        validate_messages(messages)?;
        let body = json!({
            "model": self.model,
            "messages": messages
                .iter()
                .map(|m| json!({"role": role_str(m.role), "content": m.content}))
                .collect::<Vec<_>>(),
        });

        #[derive(Deserialize)]
        struct Choice {
            message: InnerMessage,
        }
        #[derive(Deserialize)]
        struct InnerMessage {
            content: String,
        }
        #[derive(Deserialize)]
        struct ChatResponse {
            choices: Vec<Choice>,
        }

        let value = self.retry.run(|| {
            self.rate.wait();
            post_json(&self.client, &self.id, &self.endpoint, self.api_key.as_deref(), &body)
        })?;
        let parsed: ChatResponse = serde_json::from_value(value)
            .map_err(|e| Error::provider(&self.id, format!("unexpected response shape: {e}")))?;
        let content = parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| Error::provider(&self.id, "response has no choices"))?;
        if content.is_empty() {
            return Err(Error::provider(&self.id, "empty assistant response"));
        }
        super::usage::record_chat(messages, &content);
        Ok(ChatExchange {
            provider_id: self.id.clone(),
            response: content,
            cache_hit: false,
        })
    }
}

pub struct HttpEmbedder {
    id: String,
    endpoint: String,
    model: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
    retry: RetryPolicy,
    rate: RateLimiter,
}

impl HttpEmbedder {
    pub fn new(
        id: impl Into<String>,
        base_url: &str,
        model: impl Into<String>,
        api_key: Option<String>,
    ) -> Result<Self> {
        Ok(HttpEmbedder {
            id: id.into(),
            endpoint: format!("{}/embeddings", base_url.trim_end_matches('/')),
            model: model.into(),
            api_key,
            client: build_client()?,
            retry: RetryPolicy::default(),
            rate: RateLimiter::unlimited(),
        })
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_rate(mut self, rate: RateLimiter) -> Self {
        self.rate = rate;
        self
    }
}

impl Embedder for HttpEmbedder {
    fn id(&self) -> &str {
        &self.id
    }

    fn embed_texts(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        if texts.iter().any(|t| t.trim().is_empty()) {
            return Err(Error::validation("cannot embed empty text"));
        }
        let body = json!({"model": self.model, "input": texts});

        #[derive(Deserialize)]
        struct Item {
            index: usize,
            embedding: Vec<f64>,
        }
        #[derive(Deserialize)]
        struct EmbedResponse {
            data: Vec<Item>,
        }

        let value = self.retry.run(|| {
            self.rate.wait();
            post_json(&self.client, &self.id, &self.endpoint, self.api_key.as_deref(), &body)
        })?;
        let mut parsed: EmbedResponse = serde_json::from_value(value)
            .map_err(|e| Error::provider(&self.id, format!("unexpected response shape: {e}")))?;
        if parsed.data.len() != texts.len() {
            return Err(Error::provider(
                &self.id,
                format!("expected {} vectors, got {}", texts.len(), parsed.data.len()),
            ));
        }
        parsed.data.sort_by_key(|d| d.index);
        let vectors: Vec<EmbeddingVector> = parsed
            .data
            .into_iter()
            .map(|d| EmbeddingVector::new(d.embedding))
            .collect::<Result<_>>()?;
        let dim = vectors[0].dim();
        if let Some(bad) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch { left: dim, right: bad.dim() });
        }
        Ok(vectors)
    }
}

pub struct HttpNer {
    id: String,
    endpoint: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
    retry: RetryPolicy,
    rate: RateLimiter,
}

impl HttpNer {
    pub fn new(id: impl Into<String>, endpoint: impl Into<String>, api_key: Option<String>) -> Result<Self> {
        Ok(HttpNer {
            id: id.into(),
            endpoint: endpoint.into(),
            api_key,
            client: build_client()?,
            retry: RetryPolicy::default(),
            rate: RateLimiter::unlimited(),
        })
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_rate(mut self, rate: RateLimiter) -> Self {
        self.rate = rate;
        self
    }
}

impl NerProvider for HttpNer {
    fn id(&self) -> &str {
        &self.id
    }

    fn entities(&self, sentence: &str, candidate_labels: &[String]) -> Result<Vec<EntitySpan>> {
        if sentence.is_empty() {
            return Err(Error::validation("ner called with empty sentence"));
        }
        if candidate_labels.is_empty() {
            return Ok(Vec::new());
        }
        let body = json!({"text": sentence, "labels": candidate_labels});

        #[derive(Deserialize)]
        struct NerResponse {
            entities: Vec<EntitySpan>,
        }

        let value = self.retry.run(|| {
            self.rate.wait();
            post_json(&self.client, &self.id, &self.endpoint, self.api_key.as_deref(), &body)
        })?;
        let parsed: NerResponse = serde_json::from_value(value)
            .map_err(|e| Error::provider(&self.id, format!("unexpected response shape: {e}")))?;
        let mut spans = parsed.entities;
        spans.retain(|s| candidate_labels.contains(&s.label));
        spans.sort_by(|a, b| (a.start, a.end).cmp(&(b.start, b.end)));
        Ok(spans)
    }
}
