//! Deterministic mock providers.
//!
//! Mocks are pure functions of (seed, input): two runs with the same seed
//! produce bit-identical output end-to-end, which is what the pipeline
//! property suite relies on.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::llm::prompts;

use super::{
    validate_messages, ChatExchange, ChatMessage, ChatProvider, Embedder, EmbeddingVector,
    EntitySpan, NerProvider, Role,
};

/// Embeds a text as the normalized sum of per-token unit vectors, weighted
/// by token count. Texts sharing the same token multiset embed identically.
///
/// Dimensions matter: per-token-pair dot noise scales as 1/√dim, so short
/// texts need a few hundred dimensions before unrelated documents sit
/// safely below near-duplicate thresholds.
#[derive(Debug)]
pub struct MockEmbedder {
    id: String,
    seed: u64,
    dim: usize,
    memo: std::sync::Mutex<std::collections::HashMap<String, std::sync::Arc<Vec<f64>>>>,
}

impl Clone for MockEmbedder {
    fn clone(&self) -> Self {
        MockEmbedder {
            id: self.id.clone(),
            seed: self.seed,
            dim: self.dim,
            memo: std::sync::Mutex::new(self.memo.lock().unwrap().clone()),
        }
    }
}

impl MockEmbedder {
    pub fn new(seed: u64, dim: usize) -> Self {
        MockEmbedder {
            id: "mock-embedder".into(),
            seed,
            dim,
            memo: std::sync::Mutex::new(std::collections::HashMap::new()),
        }
    }

    fn memoized_token_vector(&self, token: &str) -> std::sync::Arc<Vec<f64>> {
        let mut memo = self.memo.lock().unwrap();
        if let Some(v) = memo.get(token) {
            return v.clone();
        }
        let v = std::sync::Arc::new(Self::token_unit_vector(self.seed, token, self.dim));
        memo.insert(token.to_string(), v.clone());
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lowercased alphanumeric-trimmed whitespace tokens.
    pub fn tokens(text: &str) -> Vec<String> {
        text.split_whitespace()
            .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
            .filter(|w| !w.is_empty())
            .collect()
    }

    /// Unit vector derived from sha256(seed || token || block), with each
    /// 8-byte little-endian word mapped into [-1, 1).
    pub fn token_unit_vector(seed: u64, token: &str, dim: usize) -> Vec<f64> {
        let mut values = Vec::with_capacity(dim);
        let mut block: u32 = 0;
        while values.len() < dim {
            let mut hasher = Sha256::new();
            hasher.update(seed.to_le_bytes());
            hasher.update(token.as_bytes());
            hasher.update(block.to_le_bytes());
            let digest = hasher.finalize();
            for chunk in digest.chunks_exact(8) {
                if values.len() == dim {
                    break;
                }
                let word = u64::from_le_bytes(chunk.try_into().unwrap());
                values.push((word as f64) / (u64::MAX as f64 / 2.0) - 1.0);
            }
            block += 1;
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut values {
                *v /= norm;
            }
        } else {
            values[0] = 1.0;
        }
        values
    }

    fn embed_one(&self, text: &str) -> Result<EmbeddingVector> {
        let tokens = Self::tokens(text);
        if tokens.is_empty() {
            return Err(Error::validation("cannot embed text with no tokens"));
        }
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for t in tokens {
            *counts.entry(t).or_insert(0) += 1;
        }
        let mut sum = vec![0.0; self.dim];
        for (token, count) in &counts {
            let unit = self.memoized_token_vector(token);
            for (s, u) in sum.iter_mut().zip(unit.iter()) {
                *s += *count as f64 * u;
            }
        }
        let norm = sum.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        for v in &mut sum {
            *v /= norm;
        }
        EmbeddingVector::new(sum)
    }
}

impl Embedder for MockEmbedder {
    fn id(&self) -> &str {
        &self.id
    }

    fn embed_texts(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
        texts.iter().map(|t| self.embed_one(t)).collect()
    }
}

/// One mock NER rule: tag `trigger` occurrences with `label` unless the
/// sentence contains any of the blocking context substrings.
#[derive(Debug, Clone)]
pub struct NerRule {
    pub trigger: String,
    pub label: String,
    pub blocked_contexts: Vec<String>,
}

impl NerRule {
    pub fn organization(trigger: impl Into<String>) -> Self {
        NerRule {
            trigger: trigger.into(),
            label: "organization".into(),
            blocked_contexts: Vec::new(),
        }
    }

    pub fn blocked_by(mut self, context: impl Into<String>) -> Self {
        self.blocked_contexts.push(context.into());
        self
    }
}

/// Table-driven zero-shot NER stand-in.
#[derive(Debug, Clone)]
pub struct MockNer {
    id: String,
    rules: Vec<NerRule>,
}

impl MockNer {
    pub fn new(rules: Vec<NerRule>) -> Self {
        MockNer { id: "mock-ner".into(), rules }
    }

    /// Rules tagging every keyword and display name of the given companies
    /// as `organization`, suppressed in sentences carrying `blocked_marker`.
    pub fn for_companies(specs: &[crate::corpus::CompanySpec], blocked_marker: &str) -> Self {
        let mut rules = Vec::new();
        for spec in specs {
            let mut triggers: Vec<&str> =
                spec.keywords.iter().map(|k| k.text()).collect();
            if !triggers.contains(&spec.display_name.as_str()) {
                triggers.push(&spec.display_name);
            }
            for t in triggers {
                rules.push(
                    NerRule::organization(t).blocked_by(blocked_marker.to_string()),
                );
            }
        }
        MockNer::new(rules)
    }
}

impl NerProvider for MockNer {
    fn id(&self) -> &str {
        &self.id
    }

    fn entities(&self, sentence: &str, candidate_labels: &[String]) -> Result<Vec<EntitySpan>> {
        if sentence.is_empty() {
            return Err(Error::validation("ner called with empty sentence"));
        }
        let mut spans = Vec::new();
        for rule in &self.rules {
            if !candidate_labels.iter().any(|l| l == &rule.label) {
                continue;
            }
            if rule.blocked_contexts.iter().any(|c| sentence.contains(c.as_str())) {
                continue;
            }
            let mut from = 0;
            while let Some(pos) = sentence[from..].find(&rule.trigger) {
                let start = from + pos;
                let end = start + rule.trigger.len();
                let before_ok = start == 0
                    || !sentence[..start].chars().next_back().unwrap().is_alphanumeric();
                let after_ok = end == sentence.len()
                    || !sentence[end..].chars().next().unwrap().is_alphanumeric();
                if before_ok && after_ok {
                    spans.push(EntitySpan {
                        text: rule.trigger.clone(),
                        label: rule.label.clone(),
                        start,
                        end,
                    });
                }
                from = end;
            }
        }
        spans.sort_by(|a, b| (a.start, a.end, &a.label).cmp(&(b.start, b.end, &b.label)));
        spans.dedup();
        Ok(spans)
    }
}

/// Marker tokens a mock chat scans for in the conversation. Markers are
/// matched as whole `[A-Za-z0-9_]+` tokens, so `FILTER_IRRELEVANT` never
/// collides with `RELEVANT`.
pub mod markers {
    pub const RELEVANT: &str = "RELEVANT";
    pub const FILTER_IRRELEVANT: &str = "FILTER_IRRELEVANT";
    pub const ESG_DIRECT: &str = "ESG_DIRECT";
    pub const IRRELEVANT: &str = "IRRELEVANT";
    pub const ESG_POS: &str = "ESG_POS";
    pub const ESG_NEG: &str = "ESG_NEG";
    pub const ESG_NEU: &str = "ESG_NEU";
    pub const ASPECT_E: &str = "ASPECT_E";
    pub const ASPECT_S: &str = "ASPECT_S";
    pub const ASPECT_G: &str = "ASPECT_G";
    /// Prefix markers: `SCORE_7` sets the relevance score, `KW_windkraft`
    /// adds a keyword.
    pub const SCORE_PREFIX: &str = "SCORE_";
    pub const KW_PREFIX: &str = "KW_";
}

/// Rule-table chat stand-in. Decides the protocol turn from the task tag in
/// the latest user prompt and answers from markers embedded in the
/// conversation.
#[derive(Debug, Clone)]
pub struct MockChat {
    id: String,
    #[allow(dead_code)]
    seed: u64,
}

impl MockChat {
    pub fn new(seed: u64) -> Self {
        MockChat { id: "mock-chat".into(), seed }
    }

    pub fn with_id(seed: u64, id: impl Into<String>) -> Self {
        MockChat { id: id.into(), seed }
    }

    fn word_tokens(text: &str) -> Vec<&str> {
        text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
            .filter(|t| !t.is_empty())
            .collect()
    }

    fn respond(&self, messages: &[ChatMessage]) -> String {
        let last_user = messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map(|m| m.content.as_str())
            .unwrap_or_default();
        let convo: String = messages
            .iter()
            .filter(|m| m.role == Role::User)
            .map(|m| m.content.as_str())
            .collect::<Vec<_>>()
            .join("\n");
        let tokens = Self::word_tokens(&convo);
        let has = |marker: &str| tokens.iter().any(|t| *t == marker);

        let filter_relevant = has(markers::RELEVANT) && !has(markers::FILTER_IRRELEVANT);

        if last_user.contains(prompts::TAG_FILTER_INITIAL) {
            format!("Relevant: {}", if filter_relevant { "yes" } else { "no" })
        } else if last_user.contains(prompts::TAG_FILTER_EXPLAIN) {
            let body = extract_block(&convo, prompts::ARTICLE_BEGIN, prompts::ARTICLE_END)
                .unwrap_or(&convo);
            let summary: Vec<&str> = body.split_whitespace().take(30).collect();
            format!(
                "Explanation: marker-driven mock assessment.\nSummary: {}",
                summary.join(" ")
            )
        } else if last_user.contains(prompts::TAG_FILTER_DIRECT) {
            format!("DirectESG: {}", if has(markers::ESG_DIRECT) { "yes" } else { "no" })
        } else if last_user.contains(prompts::TAG_FILTER_FINAL) {
            format!("FinalRelevant: {}", if filter_relevant { "yes" } else { "no" })
        } else if last_user.contains(prompts::TAG_DETERMINE) {
            self.determine_response(&convo, &tokens)
        } else if last_user.contains(prompts::TAG_TRANSLATE) {
            let body = extract_block(last_user, prompts::TEXT_BEGIN, prompts::TEXT_END)
                .unwrap_or(last_user)
                .trim();
            format!("[EN] {body}")
        } else {
            // Unknown task: echo markers for debuggability.
            format!("Ack: {}", tokens.len())
        }
    }

    fn determine_response(&self, convo: &str, tokens: &[&str]) -> String {
        let has = |marker: &str| tokens.iter().any(|t| *t == marker);
        let body = extract_block(convo, prompts::ARTICLE_BEGIN, prompts::ARTICLE_END)
            .unwrap_or(convo);
        let summary: Vec<&str> = body.split_whitespace().take(30).collect();
        let summary = summary.join(" ");
        if has(markers::IRRELEVANT) {
            return format!("Summary: {summary}\nRelevant: nein");
        }
        let sentiment = if has(markers::ESG_POS) {
            "positiv"
        } else if has(markers::ESG_NEG) {
            "negativ"
        } else {
            "neutral"
        };
        let aspect = if has(markers::ASPECT_S) {
            "S"
        } else if has(markers::ASPECT_G) {
            "G"
        } else {
            "E"
        };
        let score = tokens
            .iter()
            .find_map(|t| t.strip_prefix(markers::SCORE_PREFIX))
            .and_then(|s| s.parse::<i64>().ok())
            .unwrap_or(7);
        let mut keywords: Vec<String> = tokens
            .iter()
            .filter_map(|t| t.strip_prefix(markers::KW_PREFIX))
            .map(|s| s.to_string())
            .collect();
        keywords.dedup();
        if keywords.is_empty() {
            keywords = vec!["esg".into(), "nachhaltigkeit".into()];
        }
        format!(
            "Summary: {summary}\nRelevant: ja\nSentiment: {sentiment}\nAspekt: {aspect}\nScore: {score}\nKeywords: {}",
            keywords.join(", ")
        )
    }
}

fn extract_block<'a>(text: &'a str, begin: &str, end: &str) -> Option<&'a str> {
    let start = text.find(begin)? + begin.len();
    let stop = text[start..].find(end)? + start;
    Some(text[start..stop].trim())
}

impl ChatProvider for MockChat {
    fn id(&self) -> &str {
        &self.id
    }

    fn chat(&self, messages: &[ChatMessage]) -> Result<ChatExchange> {
        validate_messages(messages)?;
        let response = self.respond(messages);
        super::usage::record_chat(messages, &response);
        Ok(ChatExchange { provider_id: self.id.clone(), response, cache_hit: false })
    }
}
