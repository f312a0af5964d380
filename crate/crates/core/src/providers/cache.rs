//! Disk-backed chat response cache keyed by content hash.
//!
//! One file per hash, written atomically (temp file + rename) so the cache
//! stays consistent under concurrent readers and writers.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};

use crate::error::Result;

use super::{validate_messages, ChatExchange, ChatMessage, ChatProvider};

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self> {
        std::fs::create_dir_all(dir.as_ref())?;
        Ok(ResponseCache { dir: dir.as_ref().to_path_buf() })
    }

    /// Content hash over (provider_id, messages), with separators so field
    /// boundaries cannot be confused.
    pub fn key(provider_id: &str, messages: &[ChatMessage]) -> String {
        let mut hasher = Sha256::new();
        hasher.update(provider_id.as_bytes());
        hasher.update([0u8]);
        for m in messages {
            hasher.update([match m.role {
                super::Role::System => b's',
                super::Role::User => b'u',
                super::Role::Assistant => b'a',
            }]);
            hasher.update([0x1f]);
            hasher.update(m.content.as_bytes());
            hasher.update([0x1e]);
        }
        hex(&hasher.finalize())
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(key)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        std::fs::read_to_string(self.path_for(key)).ok()
    }

    pub fn put(&self, key: &str, response: &str) -> Result<()> {
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::write(&tmp, response)?;
        std::fs::rename(&tmp, self.path_for(key))?;
        Ok(())
    }
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Chat provider decorator adding persistent response caching.
pub struct CachedChat<P> {
    inner: P,
    cache: ResponseCache,
}

impl<P: ChatProvider> CachedChat<P> {
    pub fn new(inner: P, cache: ResponseCache) -> Self {
        CachedChat { inner, cache }
    }
}

impl<P: ChatProvider> ChatProvider for CachedChat<P> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn chat(&self, messages: &[ChatMessage]) -> Result<ChatExchange> {
        validate_messages(messages)?;
        let key = ResponseCache::key(self.inner.id(), messages);
        if let Some(response) = self.cache.get(&key) {
            super::usage::record_cache_hit();
            return Ok(ChatExchange {
                provider_id: self.inner.id().to_string(),
                response,
                cache_hit: true,
            });
        }
        let exchange = self.inner.chat(messages)?;
        self.cache.put(&key, &exchange.response)?;
        Ok(exchange)
    }
}
