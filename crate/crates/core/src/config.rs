//! Run configuration: one TOML file holds the date range, provider
//! endpoints per stage (and per date range, so model switches over time are
//! pure configuration), dedup thresholds, clustering settings and seeds.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::dedup::DedupConfig;
use crate::error::{Error, Result};
use crate::providers::{
    CachedChat, ChatProvider, Embedder, HttpChat, HttpEmbedder, HttpNer, MockChat, MockEmbedder,
    MockNer, NerProvider, RateLimiter, ResponseCache, RetryPolicy,
};
use crate::topics::ClusterConfig;

fn default_workers() -> usize {
    4
}

fn default_dim() -> usize {
    256
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSection {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    pub date_from: Option<NaiveDate>,
    pub date_to: Option<NaiveDate>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { seed: 0, workers: default_workers(), date_from: None, date_to: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathsSection {
    pub corpus: PathBuf,
    pub companies: PathBuf,
    pub workdir: PathBuf,
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    #[default]
    Mock,
    Http,
}

/// One provider route; `from`/`to` bound the publication dates it serves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProviderSpec {
    #[serde(default)]
    pub kind: ProviderKind,
    pub base_url: Option<String>,
    pub model: Option<String>,
    /// Name of the environment variable holding the API key.
    pub api_key_env: Option<String>,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    #[serde(default = "default_dim")]
    pub dimension: usize,
}

impl Default for ProviderSpec {
    fn default() -> Self {
        ProviderSpec {
            kind: ProviderKind::Mock,
            base_url: None,
            model: None,
            api_key_env: None,
            from: None,
            to: None,
            dimension: default_dim(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProvidersSection {
    #[serde(default)]
    pub embedder: ProviderSpec,
    #[serde(default)]
    pub ner: ProviderSpec,
    #[serde(default)]
    pub filter_chat: Vec<ProviderSpec>,
    #[serde(default)]
    pub final_chat: Vec<ProviderSpec>,
    #[serde(default)]
    pub translate_chat: ProviderSpec,
    #[serde(default)]
    pub retry: RetryPolicy,
    /// Minimum milliseconds between requests per provider (0 = unlimited).
    #[serde(default)]
    pub min_interval_ms: u64,
}

impl Default for ProvidersSection {
    fn default() -> Self {
        ProvidersSection {
            embedder: ProviderSpec::default(),
            ner: ProviderSpec::default(),
            filter_chat: vec![ProviderSpec::default()],
            final_chat: vec![ProviderSpec::default()],
            translate_chat: ProviderSpec::default(),
            retry: RetryPolicy::default(),
            min_interval_ms: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntitySection {
    pub org_labels: Vec<String>,
}

impl Default for EntitySection {
    fn default() -> Self {
        EntitySection { org_labels: crate::entity_filter::default_org_labels() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct PipelineConfig {
    #[serde(default)]
    pub run: RunSection,
    pub paths: Option<PathsSection>,
    #[serde(default)]
    pub providers: ProvidersSection,
    #[serde(rename = "match", default)]
    pub matching: crate::corpus::MatchPolicy,
    #[serde(default)]
    pub dedup_paragraphs: DedupConfig,
    #[serde(default)]
    pub dedup_summaries: DedupConfig,
    #[serde(default)]
    pub entity: EntitySection,
    #[serde(default)]
    pub clustering: ClusterConfig,
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::config(format!("cannot read config {}: {e}", path.as_ref().display()))
        })?;
        let cfg: PipelineConfig =
            toml::from_str(&text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.dedup_paragraphs.validate()?;
        self.dedup_summaries.validate()?;
        if self.run.workers == 0 {
            return Err(Error::config("run.workers must be at least 1"));
        }
        Ok(())
    }

    pub fn paths(&self) -> Result<&PathsSection> {
        self.paths.as_ref().ok_or_else(|| Error::config("config has no [paths] section"))
    }
}

/// A set of chat routes selected by publication date.
pub struct ChatRouter {
    routes: Vec<(Option<NaiveDate>, Option<NaiveDate>, Arc<dyn ChatProvider>)>,
}

impl ChatRouter {
    pub fn route(&self, published_at: DateTime<Utc>) -> Result<&Arc<dyn ChatProvider>> {
        let date = published_at.date_naive();
        self.routes
            .iter()
            .find(|(from, to, _)| {
                from.map(|f| date >= f).unwrap_or(true) && to.map(|t| date <= t).unwrap_or(true)
            })
            .map(|(_, _, p)| p)
            .ok_or_else(|| {
                Error::config(format!("no chat provider route covers date {date}"))
            })
    }
}

/// All providers wired up for a run.
pub struct ProviderSet {
    pub embedder: Arc<dyn Embedder>,
    pub ner: Arc<dyn NerProvider>,
    pub filter_chat: ChatRouter,
    pub final_chat: ChatRouter,
    pub translate_chat: Arc<dyn ChatProvider>,
}

fn api_key(spec: &ProviderSpec) -> Result<Option<String>> {
    match &spec.api_key_env {
        None => Ok(None),
        Some(var) => std::env::var(var).map(Some).map_err(|_| {
            Error::config(format!("environment variable `{var}` (API key) is not set"))
        }),
    }
}

fn build_chat(
    spec: &ProviderSpec,
    id: &str,
    cfg: &PipelineConfig,
    mock: bool,
    cache_dir: Option<&Path>,
) -> Result<Arc<dyn ChatProvider>> {
    if mock || spec.kind == ProviderKind::Mock {
        return Ok(Arc::new(MockChat::with_id(cfg.run.seed, id.to_string())));
    }
    let base = spec
        .base_url
        .as_deref()
        .ok_or_else(|| Error::config(format!("provider `{id}` needs base_url")))?;
    let model = spec
        .model
        .as_deref()
        .ok_or_else(|| Error::config(format!("provider `{id}` needs model")))?;
    let chat = HttpChat::new(id, base, model, api_key(spec)?)?
        .with_retry(cfg.providers.retry)
        .with_rate(RateLimiter::new(std::time::Duration::from_millis(
            cfg.providers.min_interval_ms,
        )));
    match cache_dir {
        Some(dir) => Ok(Arc::new(CachedChat::new(chat, ResponseCache::new(dir)?))),
        None => Ok(Arc::new(chat)),
    }
}

fn build_router(
    specs: &[ProviderSpec],
    id_prefix: &str,
    cfg: &PipelineConfig,
    mock: bool,
    cache_dir: Option<&Path>,
) -> Result<ChatRouter> {
    let specs: Vec<ProviderSpec> = if specs.is_empty() {
        vec![ProviderSpec::default()]
    } else {
        specs.to_vec()
    };
    let mut routes = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let id = if specs.len() == 1 {
            id_prefix.to_string()
        } else {
            format!("{id_prefix}-{i}")
        };
        routes.push((spec.from, spec.to, build_chat(spec, &id, cfg, mock, cache_dir)?));
    }
    Ok(ChatRouter { routes })
}

/// Instantiate every provider. `force_mock` is the CLI `--mock` switch.
pub fn build_providers(
    cfg: &PipelineConfig,
    companies: &[crate::corpus::CompanySpec],
    non_org_marker: &str,
    force_mock: bool,
) -> Result<ProviderSet> {
    let cache_dir = cfg.paths.as_ref().and_then(|p| p.cache_dir.clone());
    let cache_dir = cache_dir.as_deref();

    let embedder: Arc<dyn Embedder> =
        if force_mock || cfg.providers.embedder.kind == ProviderKind::Mock {
            Arc::new(MockEmbedder::new(cfg.run.seed, cfg.providers.embedder.dimension))
        } else {
            let spec = &cfg.providers.embedder;
            let base = spec
                .base_url
                .as_deref()
                .ok_or_else(|| Error::config("embedder needs base_url"))?;
            let model =
                spec.model.as_deref().ok_or_else(|| Error::config("embedder needs model"))?;
            Arc::new(
                HttpEmbedder::new("embedder", base, model, api_key(spec)?)?
                    .with_retry(cfg.providers.retry)
                    .with_rate(RateLimiter::new(std::time::Duration::from_millis(
                        cfg.providers.min_interval_ms,
                    ))),
            )
        };

    let ner: Arc<dyn NerProvider> = if force_mock || cfg.providers.ner.kind == ProviderKind::Mock
    {
        Arc::new(MockNer::for_companies(companies, non_org_marker))
    } else {
        let spec = &cfg.providers.ner;
        let base =
            spec.base_url.as_deref().ok_or_else(|| Error::config("ner needs base_url"))?;
        Arc::new(
            HttpNer::new("ner", base, api_key(spec)?)?
                .with_retry(cfg.providers.retry)
                .with_rate(RateLimiter::new(std::time::Duration::from_millis(
                    cfg.providers.min_interval_ms,
                ))),
        )
    };

    Ok(ProviderSet {
        embedder,
        ner,
        filter_chat: build_router(&cfg.providers.filter_chat, "filter-chat", cfg, force_mock, cache_dir)?,
        final_chat: build_router(&cfg.providers.final_chat, "final-chat", cfg, force_mock, cache_dir)?,
        translate_chat: build_chat(
            &cfg.providers.translate_chat,
            "translate-chat",
            cfg,
            force_mock,
            cache_dir,
        )?,
    })
}
