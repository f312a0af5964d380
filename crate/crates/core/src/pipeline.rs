//! Stage orchestration: resumable checkpointed stages with volume
//! accounting.
//!
//! Stage order: ingest → dedup-paragraphs → ner-filter → llm-filter →
//! dedup-summaries → determine → translate. Every stage requires its
//! predecessor's checkpoint, appends its own in input order (so re-runs and
//! resumed runs produce byte-identical files) and records a stage report.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::checkpoint::{done_keys, ordered_parallel_map, read_jsonl, JsonlWriter, ReportLog, StageReport};
use crate::config::{build_providers, PipelineConfig, ProviderSet};
use crate::corpus::{self, Article, CompanySpec, KeywordMatch};
use crate::dataset::DatasetRecord;
use crate::dedup;
use crate::entity_filter;
use crate::error::{Error, Result};
use crate::llm::{self, QuarantineRecord};

pub const STAGES: [&str; 7] = [
    "ingest",
    "dedup-paragraphs",
    "ner-filter",
    "llm-filter",
    "dedup-summaries",
    "determine",
    "translate",
];

/// Marker understood by the mock NER as "this mention is not an
/// organization"; synthetic corpora embed it in gate-drop articles.
pub const NON_ORG_MARKER: &str = "NONORG";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestRecord {
    pub key: String,
    pub article_id: String,
    pub company_id: String,
    pub matches: Vec<KeywordMatch>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DedupRecord {
    pub id: String,
    pub kept: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representative_id: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NerRecord {
    pub id: String,
    pub kept: bool,
    pub labels: Vec<(String, Option<String>)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterRecord {
    pub id: String,
    pub initial_relevant: bool,
    pub explanation: String,
    pub summary: String,
    pub direct_esg: bool,
    pub final_relevant: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetermineState {
    pub id: String,
    pub outcome: DetermineOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetermineOutcome {
    Determined,
    Irrelevant,
    Quarantined,
}

pub struct Pipeline {
    pub cfg: PipelineConfig,
    pub companies: Vec<CompanySpec>,
    providers: ProviderSet,
    workdir: PathBuf,
}

fn parse_key(key: &str) -> (&str, &str) {
    key.split_once("::").expect("record keys are company::article")
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig, force_mock: bool) -> Result<Self> {
        let paths = cfg.paths()?.clone();
        let companies = corpus::load_company_specs(&paths.companies)?;
        let providers = build_providers(&cfg, &companies, NON_ORG_MARKER, force_mock)?;
        std::fs::create_dir_all(&paths.workdir)?;
        Ok(Pipeline { cfg, companies, providers, workdir: paths.workdir })
    }

    /// In-memory construction for synthetic runs and tests: the corpus is
    /// written into the workdir so every stage behaves as in a file-backed
    /// run.
    pub fn for_corpus(
        mut cfg: PipelineConfig,
        articles: &[Article],
        companies: Vec<CompanySpec>,
        workdir: PathBuf,
        force_mock: bool,
    ) -> Result<Self> {
        std::fs::create_dir_all(&workdir)?;
        let corpus_path = workdir.join("corpus.jsonl");
        corpus::write_corpus(&corpus_path, articles)?;
        let companies_path = workdir.join("companies.toml");
        let serialized = toml::to_string(&CompaniesFile { companies: companies.clone() })
            .map_err(|e| Error::config(e.to_string()))?;
        std::fs::write(&companies_path, serialized)?;
        cfg.paths = Some(crate::config::PathsSection {
            corpus: corpus_path,
            companies: companies_path,
            workdir: workdir.clone(),
            cache_dir: None,
        });
        let providers = build_providers(&cfg, &companies, NON_ORG_MARKER, force_mock)?;
        Ok(Pipeline { cfg, companies, providers, workdir })
    }

    pub fn workdir(&self) -> &PathBuf {
        &self.workdir
    }

    fn file(&self, name: &str) -> PathBuf {
        self.workdir.join(name)
    }

    pub fn determinations_path(&self) -> PathBuf {
        self.file("determinations.jsonl")
    }

    fn reports(&self) -> ReportLog {
        ReportLog::new(&self.workdir)
    }

    fn require_stage(&self, stage: &str, predecessor: &str, file: &str) -> Result<()> {
        if !self.file(file).exists() {
            return Err(Error::MissingCheckpoint {
                stage: stage.to_string(),
                predecessor: predecessor.to_string(),
            });
        }
        Ok(())
    }

    fn start_count(&self) -> Result<u64> {
        Ok(self
            .reports()
            .get("ingest")?
            .map(|r| r.input_count)
            .unwrap_or(0))
    }

    fn load_articles(&self) -> Result<(BTreeMap<String, Article>, u64, u64)> {
        let paths = self.cfg.paths()?;
        let (articles, errors) = corpus::read_corpus(&paths.corpus)?;
        for e in &errors {
            log::warn!("corpus: {e}");
        }
        let total = articles.len() as u64;
        let map: BTreeMap<String, Article> =
            articles.into_iter().map(|a| (a.id.clone(), a)).collect();
        Ok((map, total, errors.len() as u64))
    }

    fn ingest_records(&self) -> Result<Vec<IngestRecord>> {
        read_jsonl(self.file("ingest.jsonl"))
    }

    fn kept_ids(&self, file: &str) -> Result<Vec<String>> {
        let records: Vec<DedupRecord> = read_jsonl(self.file(file))?;
        Ok(records.into_iter().filter(|r| r.kept).map(|r| r.id).collect())
    }

    /// Keyword-match every (article, company) pair after language and date
    /// filtering. Batch stage: rewrites its checkpoint deterministically.
    pub fn stage_ingest(&self) -> Result<StageReport> {
        let (articles, total_articles, invalid) = self.load_articles()?;
        if invalid > 0 {
            log::warn!("{invalid} invalid corpus records skipped");
        }
        let mut writer = JsonlWriter::append(self.file("ingest.jsonl.tmp"))?;
        let mut output = 0u64;
        for company in &self.companies {
            for article in articles.values() {
                if !corpus::filter_language(article) {
                    continue;
                }
                if let Some(from) = self.cfg.run.date_from {
                    if article.published_at.date_naive() < from {
                        continue;
                    }
                }
                if let Some(to) = self.cfg.run.date_to {
                    if article.published_at.date_naive() > to {
                        continue;
                    }
                }
                let matches = corpus::match_keywords(article, company, self.cfg.matching);
                if matches.is_empty() {
                    continue;
                }
                let key = format!("{}::{}", company.company_id, article.id);
                writer.write(&IngestRecord {
                    key,
                    article_id: article.id.clone(),
                    company_id: company.company_id.clone(),
                    matches,
                })?;
                output += 1;
            }
        }
        drop(writer);
        std::fs::rename(self.file("ingest.jsonl.tmp"), self.file("ingest.jsonl"))?;
        let report = StageReport::new("ingest", total_articles, output, total_articles);
        self.reports().record(&report)?;
        Ok(report)
    }

    /// Per company, embed distinct keyword paragraphs and drop
    /// near-duplicates within the window. Batch stage.
    pub fn stage_dedup_paragraphs(&self) -> Result<StageReport> {
        self.require_stage("dedup-paragraphs", "ingest", "ingest.jsonl")?;
        let (articles, _, _) = self.load_articles()?;
        let ingest = self.ingest_records()?;
        let mut records = Vec::new();
        for rec in &ingest {
            let article = articles.get(&rec.article_id).ok_or_else(|| {
                Error::validation(format!("ingest references unknown article {}", rec.article_id))
            })?;
            let mut article = article.clone();
            article.company_id = rec.company_id.clone();
            records.push((rec.key.clone(), article, rec.matches.clone()));
        }
        let (outcome, excluded) = dedup::dedup_paragraph_stage(
            &records,
            &self.providers.embedder,
            &self.cfg.dedup_paragraphs,
        )?;
        for key in &excluded {
            log::warn!("dedup-paragraphs: `{key}` had no keyword paragraphs");
        }
        let mut writer = JsonlWriter::append(self.file("dedup_paragraphs.jsonl.tmp"))?;
        let mut kept = 0u64;
        for rec in &ingest {
            if outcome.is_kept(&rec.key) {
                writer.write(&DedupRecord { id: rec.key.clone(), kept: true, representative_id: None })?;
                kept += 1;
            } else if let Some(rep) = outcome.discarded.get(&rec.key) {
                writer.write(&DedupRecord {
                    id: rec.key.clone(),
                    kept: false,
                    representative_id: Some(rep.clone()),
                })?;
            }
        }
        drop(writer);
        std::fs::rename(
            self.file("dedup_paragraphs.jsonl.tmp"),
            self.file("dedup_paragraphs.jsonl"),
        )?;
        let report =
            StageReport::new("dedup-paragraphs", ingest.len() as u64, kept, self.start_count()?);
        self.reports().record(&report)?;
        Ok(report)
    }

    /// Entity gate over keyword sentences; per-item stage with resume.
    pub fn stage_ner_filter(&self) -> Result<StageReport> {
        self.require_stage("ner-filter", "dedup-paragraphs", "dedup_paragraphs.jsonl")?;
        let (articles, _, _) = self.load_articles()?;
        let ingest: BTreeMap<String, IngestRecord> =
            self.ingest_records()?.into_iter().map(|r| (r.key.clone(), r)).collect();
        let inputs = self.kept_ids("dedup_paragraphs.jsonl")?;

        let done = done_keys::<NerRecord, _>(self.file("ner_filter.jsonl"), |r| r.id.clone())?;
        let todo: Vec<String> = inputs.iter().filter(|k| !done.contains(*k)).cloned().collect();

        let quarantine = Mutex::new(JsonlWriter::append(self.file("quarantine.jsonl"))?);
        let results = ordered_parallel_map(todo, self.cfg.run.workers, |key| {
            let rec = &ingest[key];
            let article = &articles[&rec.article_id];
            let sentences = entity_filter::keyword_sentences(article, &rec.matches);
            match entity_filter::entity_gate(
                &sentences,
                &self.providers.ner,
                &self.cfg.entity.org_labels,
            ) {
                Ok(decision) => Ok(NerRecord {
                    id: key.clone(),
                    kept: decision.keep,
                    labels: decision.labels,
                }),
                Err(e) => Err((key.clone(), e)),
            }
        });
        let mut writer = JsonlWriter::append(self.file("ner_filter.jsonl"))?;
        for result in results {
            match result {
                Ok(record) => writer.write(&record)?,
                Err((key, e)) => {
                    quarantine.lock().unwrap().write(&QuarantineRecord {
                        article_id: key.clone(),
                        stage: "ner-filter".into(),
                        attempts: self.cfg.providers.retry.attempts,
                        last_error: e.to_string(),
                        raw_response: String::new(),
                    })?;
                    writer.write(&NerRecord { id: key, kept: false, labels: vec![] })?;
                }
            }
        }
        let all: Vec<NerRecord> = read_jsonl(self.file("ner_filter.jsonl"))?;
        let kept = all.iter().filter(|r| r.kept).count() as u64;
        let report =
            StageReport::new("ner-filter", inputs.len() as u64, kept, self.start_count()?);
        self.reports().record(&report)?;
        Ok(report)
    }

    /// Cheap multi-turn relevance filter; per-item stage with resume.
    pub fn stage_llm_filter(&self) -> Result<StageReport> {
        self.require_stage("llm-filter", "ner-filter", "ner_filter.jsonl")?;
        let (articles, _, _) = self.load_articles()?;
        let ingest: BTreeMap<String, IngestRecord> =
            self.ingest_records()?.into_iter().map(|r| (r.key.clone(), r)).collect();
        let ner: Vec<NerRecord> = read_jsonl(self.file("ner_filter.jsonl"))?;
        let inputs: Vec<String> =
            ner.into_iter().filter(|r| r.kept).map(|r| r.id).collect();

        let done = done_keys::<FilterRecord, _>(self.file("llm_filter.jsonl"), |r| r.id.clone())?;
        let todo: Vec<String> = inputs.iter().filter(|k| !done.contains(*k)).cloned().collect();

        let companies: BTreeMap<&str, &CompanySpec> =
            self.companies.iter().map(|c| (c.company_id.as_str(), c)).collect();
        let results = ordered_parallel_map(todo, self.cfg.run.workers, |key| {
            let (company_id, _) = parse_key(key);
            let rec = &ingest[key];
            let article = &articles[&rec.article_id];
            let company = companies[company_id];
            let provider = match self.providers.filter_chat.route(article.published_at) {
                Ok(p) => p,
                Err(e) => {
                    return Err(llm::LlmFailure {
                        attempts: 0,
                        last_error: e.to_string(),
                        raw_response: String::new(),
                    }
                    .into_quarantine(key, "llm-filter"))
                }
            };
            llm::run_filter_stage(article, company, provider)
                .map(|verdict| FilterRecord {
                    id: key.clone(),
                    initial_relevant: verdict.initial_relevant,
                    explanation: verdict.explanation.clone(),
                    summary: verdict.summary.clone(),
                    direct_esg: verdict.direct_esg,
                    final_relevant: verdict.final_relevant,
                    passed: verdict.passes(),
                })
                .map_err(|failure| failure.into_quarantine(key, "llm-filter"))
        });
        let mut writer = JsonlWriter::append(self.file("llm_filter.jsonl"))?;
        let mut quarantine = JsonlWriter::append(self.file("quarantine.jsonl"))?;
        for result in results {
            match result {
                Ok(record) => writer.write(&record)?,
                Err(q) => quarantine.write(&q)?,
            }
        }
        let all: Vec<FilterRecord> = read_jsonl(self.file("llm_filter.jsonl"))?;
        let passed = all.iter().filter(|r| r.passed).count() as u64;
        let report =
            StageReport::new("llm-filter", inputs.len() as u64, passed, self.start_count()?);
        self.reports().record(&report)?;
        Ok(report)
    }

    /// Near-duplicate removal over filter-stage summaries. Batch stage.
    pub fn stage_dedup_summaries(&self) -> Result<StageReport> {
        self.require_stage("dedup-summaries", "llm-filter", "llm_filter.jsonl")?;
        let (articles, _, _) = self.load_articles()?;
        let filters: Vec<FilterRecord> = read_jsonl(self.file("llm_filter.jsonl"))?;
        let passed: Vec<&FilterRecord> = filters.iter().filter(|r| r.passed).collect();
        let records: Vec<(String, String, chrono::DateTime<chrono::Utc>, String)> = passed
            .iter()
            .map(|r| {
                let (company_id, article_id) = parse_key(&r.id);
                (
                    r.id.clone(),
                    company_id.to_string(),
                    articles[article_id].published_at,
                    r.summary.clone(),
                )
            })
            .collect();
        let (outcome, quarantined) = dedup::dedup_summary_stage(
            &records,
            &self.providers.embedder,
            &self.cfg.dedup_summaries,
        )?;
        let mut quarantine = JsonlWriter::append(self.file("quarantine.jsonl"))?;
        for id in &quarantined {
            quarantine.write(&QuarantineRecord {
                article_id: id.clone(),
                stage: "dedup-summaries".into(),
                attempts: 0,
                last_error: "empty summary".into(),
                raw_response: String::new(),
            })?;
        }
        let mut writer = JsonlWriter::append(self.file("dedup_summaries.jsonl.tmp"))?;
        let mut kept = 0u64;
        for r in &passed {
            if outcome.is_kept(&r.id) {
                writer.write(&DedupRecord { id: r.id.clone(), kept: true, representative_id: None })?;
                kept += 1;
            } else if let Some(rep) = outcome.discarded.get(&r.id) {
                writer.write(&DedupRecord {
                    id: r.id.clone(),
                    kept: false,
                    representative_id: Some(rep.clone()),
                })?;
            }
        }
        drop(writer);
        std::fs::rename(
            self.file("dedup_summaries.jsonl.tmp"),
            self.file("dedup_summaries.jsonl"),
        )?;
        let report = StageReport::new(
            "dedup-summaries",
            passed.len() as u64,
            kept,
            self.start_count()?,
        );
        self.reports().record(&report)?;
        Ok(report)
    }

    /// Final determination; per-item stage with resume keyed on the state
    /// log (so irrelevant and quarantined articles are never re-queried).
    pub fn stage_determine(&self) -> Result<StageReport> {
        self.require_stage("determine", "dedup-summaries", "dedup_summaries.jsonl")?;
        let (articles, _, _) = self.load_articles()?;
        let inputs = self.kept_ids("dedup_summaries.jsonl")?;
        let done =
            done_keys::<DetermineState, _>(self.file("determine_state.jsonl"), |r| r.id.clone())?;
        let todo: Vec<String> = inputs.iter().filter(|k| !done.contains(*k)).cloned().collect();

        let companies: BTreeMap<&str, &CompanySpec> =
            self.companies.iter().map(|c| (c.company_id.as_str(), c)).collect();
        let results = ordered_parallel_map(todo, self.cfg.run.workers, |key| {
            let (company_id, article_id) = parse_key(key);
            let article = &articles[article_id];
            let company = companies[company_id];
            let provider = match self.providers.final_chat.route(article.published_at) {
                Ok(p) => p,
                Err(e) => {
                    return Err(llm::LlmFailure {
                        attempts: 0,
                        last_error: e.to_string(),
                        raw_response: String::new(),
                    }
                    .into_quarantine(key, "determine"))
                }
            };
            llm::run_determination(article, company, provider)
                .map(|det| (key.clone(), company.display_name.clone(), det))
                .map_err(|failure| failure.into_quarantine(key, "determine"))
        });

        let mut state = JsonlWriter::append(self.file("determine_state.jsonl"))?;
        let mut dataset = JsonlWriter::append(self.determinations_path())?;
        let mut quarantine = JsonlWriter::append(self.file("quarantine.jsonl"))?;
        for result in results {
            match result {
                Ok((key, display_name, det)) if det.relevant => {
                    let (_, article_id) = parse_key(&key);
                    let article = &articles[article_id];
                    dataset.write(&DatasetRecord {
                        company: display_name,
                        url: article.url.clone(),
                        published_at: article.published_at,
                        summary: det.summary,
                        summary_en: det.summary_en,
                        sentiment: det.sentiment.expect("relevant implies sentiment"),
                        aspect: det.aspect.expect("relevant implies aspect"),
                        relevance_score: det.relevance_score.expect("relevant implies score"),
                        keywords: det.keywords,
                    })?;
                    state.write(&DetermineState { id: key, outcome: DetermineOutcome::Determined })?;
                }
                Ok((key, _, _)) => {
                    state.write(&DetermineState { id: key, outcome: DetermineOutcome::Irrelevant })?;
                }
                Err(q) => {
                    state.write(&DetermineState {
                        id: q.article_id.clone(),
                        outcome: DetermineOutcome::Quarantined,
                    })?;
                    quarantine.write(&q)?;
                }
            }
        }
        let all: Vec<DetermineState> = read_jsonl(self.file("determine_state.jsonl"))?;
        let determined =
            all.iter().filter(|r| r.outcome == DetermineOutcome::Determined).count() as u64;
        let report =
            StageReport::new("determine", inputs.len() as u64, determined, self.start_count()?);
        self.reports().record(&report)?;
        Ok(report)
    }

    /// Fill in English summaries. Idempotent (already-translated records
    /// are left alone); provider failures leave the field absent.
    pub fn stage_translate(&self) -> Result<StageReport> {
        self.require_stage("translate", "determine", "determinations.jsonl")?;
        let records: Vec<DatasetRecord> = read_jsonl(self.determinations_path())?;
        let input = records.len() as u64;
        let todo: Vec<(usize, String)> = records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.summary_en.is_none())
            .map(|(i, r)| (i, r.summary.clone()))
            .collect();
        let translations = ordered_parallel_map(todo, self.cfg.run.workers, |(i, summary)| {
            (*i, llm::translate_summary(summary, &self.providers.translate_chat))
        });
        let mut records = records;
        for (i, result) in translations {
            match result {
                Ok(text) => records[i].summary_en = Some(text),
                Err(e) => log::warn!("translate: record {i}: {e}"),
            }
        }
        let tmp = self.file("determinations.jsonl.tmp");
        crate::dataset::write_jsonl(&tmp, &records)?;
        std::fs::rename(&tmp, self.determinations_path())?;
        let translated = records.iter().filter(|r| r.summary_en.is_some()).count() as u64;
        let report = StageReport::new("translate", input, translated, self.start_count()?);
        self.reports().record(&report)?;
        Ok(report)
    }

    pub fn run_stage(&self, stage: &str) -> Result<StageReport> {
        match stage {
            "ingest" => self.stage_ingest(),
            "dedup-paragraphs" => self.stage_dedup_paragraphs(),
            "ner-filter" => self.stage_ner_filter(),
            "llm-filter" => self.stage_llm_filter(),
            "dedup-summaries" => self.stage_dedup_summaries(),
            "determine" => self.stage_determine(),
            "translate" => self.stage_translate(),
            other => Err(Error::config(format!(
                "unknown stage `{other}`; expected one of {STAGES:?}"
            ))),
        }
    }

    /// Sequential full run. Translation is opt-in.
    pub fn run_all(&self, include_translate: bool) -> Result<Vec<StageReport>> {
        let mut reports = Vec::new();
        for stage in STAGES {
            if stage == "translate" && !include_translate {
                continue;
            }
            let report = self.run_stage(stage)?;
            log::info!(
                "{}: {} -> {} ({:.1}% of previous)",
                report.stage,
                report.input_count,
                report.output_count,
                100.0 * (1.0 - report.reduction_vs_previous)
            );
            reports.push(report);
        }
        Ok(reports)
    }

    /// Terminal-state accounting for the llm stages: every input ends in
    /// exactly one of dropped, quarantined or passed/determined.
    pub fn reconcile(&self) -> Result<Vec<(String, u64, u64, u64, u64)>> {
        let mut out = Vec::new();
        let quarantined: Vec<QuarantineRecord> = if self.file("quarantine.jsonl").exists() {
            read_jsonl(self.file("quarantine.jsonl"))?
        } else {
            Vec::new()
        };
        let count_q = |stage: &str| {
            quarantined.iter().filter(|q| q.stage == stage).map(|q| &q.article_id).collect::<BTreeSet<_>>().len() as u64
        };
        if self.file("llm_filter.jsonl").exists() {
            let ner: Vec<NerRecord> = read_jsonl(self.file("ner_filter.jsonl"))?;
            let inputs = ner.iter().filter(|r| r.kept).count() as u64;
            let records: Vec<FilterRecord> = read_jsonl(self.file("llm_filter.jsonl"))?;
            let passed = records.iter().filter(|r| r.passed).count() as u64;
            let dropped = records.len() as u64 - passed;
            out.push(("llm-filter".to_string(), inputs, passed, dropped, count_q("llm-filter")));
        }
        if self.file("determine_state.jsonl").exists() {
            let inputs = self.kept_ids("dedup_summaries.jsonl")?.len() as u64;
            let states: Vec<DetermineState> = read_jsonl(self.file("determine_state.jsonl"))?;
            let determined =
                states.iter().filter(|s| s.outcome == DetermineOutcome::Determined).count() as u64;
            let irrelevant =
                states.iter().filter(|s| s.outcome == DetermineOutcome::Irrelevant).count() as u64;
            let quarantined =
                states.iter().filter(|s| s.outcome == DetermineOutcome::Quarantined).count() as u64;
            out.push(("determine".to_string(), inputs, determined, irrelevant, quarantined));
        }
        Ok(out)
    }
}

#[derive(Serialize)]
struct CompaniesFile {
    companies: Vec<CompanySpec>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    fn mock_pipeline(dir: &std::path::Path, seed: u64) -> Pipeline {
        let corpus = synthetic::mock_corpus(60, 11);
        let mut cfg = PipelineConfig::default();
        cfg.run.seed = seed;
        cfg.run.workers = 3;
        Pipeline::for_corpus(
            cfg,
            &corpus.articles,
            corpus.companies,
            dir.to_path_buf(),
            true,
        )
        .unwrap()
    }

    #[test]
    fn stages_require_their_predecessor() {
        let dir = tempfile::tempdir().unwrap();
        let p = mock_pipeline(dir.path(), 1);
        let err = p.stage_dedup_paragraphs().unwrap_err();
        match err {
            Error::MissingCheckpoint { stage, predecessor } => {
                assert_eq!(stage, "dedup-paragraphs");
                assert_eq!(predecessor, "ingest");
            }
            other => panic!("unexpected error {other}"),
        }
        let err = p.stage_determine().unwrap_err();
        assert!(err.to_string().contains("dedup-summaries"));
    }

    #[test]
    fn full_mock_run_is_monotone_and_reconciles() {
        let dir = tempfile::tempdir().unwrap();
        let p = mock_pipeline(dir.path(), 5);
        let reports = p.run_all(false).unwrap();
        assert_eq!(reports.len(), 6);
        for pair in reports.windows(2) {
            assert!(
                pair[1].output_count <= pair[0].output_count,
                "{} -> {}",
                pair[0].stage,
                pair[1].stage
            );
        }
        // Retention product identity: per-stage retentions compose to the
        // overall retention.
        let product: f64 = reports
            .iter()
            .map(|r| 1.0 - r.reduction_vs_previous)
            .product();
        let overall = 1.0 - reports.last().unwrap().reduction_vs_start;
        assert!(
            (product - overall).abs() < 1e-9,
            "product {product} vs overall {overall}"
        );

        for (stage, inputs, kept, dropped, quarantined) in p.reconcile().unwrap() {
            assert_eq!(inputs, kept + dropped + quarantined, "{stage}");
        }
    }

    #[test]
    fn interrupted_stage_resumes_to_identical_bytes() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let a = mock_pipeline(dir_a.path(), 9);
        let b = mock_pipeline(dir_b.path(), 9);
        for p in [&a, &b] {
            p.stage_ingest().unwrap();
            p.stage_dedup_paragraphs().unwrap();
            p.stage_ner_filter().unwrap();
        }
        a.stage_llm_filter().unwrap();

        // Simulate an interrupt in b: truncate the filter checkpoint to the
        // first half, then re-run the stage.
        b.stage_llm_filter().unwrap();
        let path = dir_b.path().join("llm_filter.jsonl");
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let half = lines.len() / 2;
        std::fs::write(&path, format!("{}\n", lines[..half].join("\n"))).unwrap();
        b.stage_llm_filter().unwrap();

        let bytes_a = std::fs::read(dir_a.path().join("llm_filter.jsonl")).unwrap();
        let bytes_b = std::fs::read(&path).unwrap();
        assert_eq!(bytes_a, bytes_b);
    }
}
