//! Command-line entry point: resumable pipeline stages plus the analysis
//! and evaluation reports.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use esgpipe::analytics;
use esgpipe::config::PipelineConfig;
use esgpipe::dataset::{self, DatasetRecord};
use esgpipe::error::{Error, Result};
use esgpipe::evaluation::{self, EvaluationSummary};
use esgpipe::pipeline::Pipeline;
use esgpipe::providers::{Embedder, MockEmbedder};
use esgpipe::report;
use esgpipe::topics;
use esgpipe::{plot, synthetic};

#[derive(Parser)]
#[command(name = "esgpipe", about = "ESG news pipeline and analysis toolkit", version)]
struct Cli {
    /// Run configuration (TOML). Required for pipeline stages.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Force deterministic mock providers regardless of configuration.
    #[arg(long, global = true)]
    mock: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportKind {
    Stats,
    Timeseries,
    Relevance,
    Topics,
    Eval,
}

#[derive(Subcommand)]
enum Command {
    /// Load the corpus and keyword-match it per company.
    Ingest,
    /// Drop near-duplicate articles via keyword-paragraph embeddings.
    DedupParagraphs,
    /// Drop articles whose keyword mentions are not organizations.
    NerFilter,
    /// Run the cheap multi-turn relevance filter.
    LlmFilter,
    /// Drop near-duplicate articles via filter summaries.
    DedupSummaries,
    /// Run the final determination model.
    Determine,
    /// Fill in English summary translations.
    Translate,
    /// Run all stages in order.
    RunAll {
        /// Also run the translate stage at the end.
        #[arg(long)]
        translate: bool,
    },
    /// Emit analysis tables (and optionally plots) from a determinations
    /// file.
    Report {
        #[arg(value_enum)]
        kind: ReportKind,
        /// Dataset file (.jsonl or .csv); defaults to the workdir
        /// determinations checkpoint.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Annotations export, required for `eval`.
        #[arg(long)]
        annotations: Option<PathBuf>,
        /// Output directory for CSV/PNG files.
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        /// Also render simple PNG charts.
        #[arg(long)]
        plots: bool,
        /// Company filter for `topics`.
        #[arg(long)]
        company: Option<String>,
        /// Moving-average window in days.
        #[arg(long, default_value_t = 30)]
        window_days: u32,
    },
    /// Draw the two evaluation samples from a dataset.
    SampleEval {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        /// Sampling seed; defaults to the config's run seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compute agreement and accuracy metrics from annotations.
    Evaluate {
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
    /// Write a deterministic synthetic corpus + company config for mock
    /// runs.
    SynthCorpus {
        #[arg(long, default_value = "synth")]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        articles: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    match &cli.config {
        Some(path) => PipelineConfig::load(path),
        None => Err(Error::config("this command needs --config <file>")),
    }
}

fn pipeline(cli: &Cli) -> Result<Pipeline> {
    Pipeline::new(load_config(cli)?, cli.mock)
}

fn print_report(report: &esgpipe::checkpoint::StageReport) {
    println!(
        "{:<18} in={:<8} out={:<8} reduction_vs_previous={:.1}% reduction_vs_start={:.1}%",
        report.stage,
        report.input_count,
        report.output_count,
        report.reduction_vs_previous * 100.0,
        report.reduction_vs_start * 100.0
    );
}

fn dataset_input(cli: &Cli, input: &Option<PathBuf>) -> Result<Vec<DatasetRecord>> {
    let path = match input {
        Some(p) => p.clone(),
        None => {
            let cfg = load_config(cli)?;
            cfg.paths()?.workdir.join("determinations.jsonl")
        }
    };
    dataset::load_dataset(path)
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Ingest => print_report(&pipeline(cli)?.run_stage("ingest")?),
        Command::DedupParagraphs => print_report(&pipeline(cli)?.run_stage("dedup-paragraphs")?),
        Command::NerFilter => print_report(&pipeline(cli)?.run_stage("ner-filter")?),
        Command::LlmFilter => print_report(&pipeline(cli)?.run_stage("llm-filter")?),
        Command::DedupSummaries => print_report(&pipeline(cli)?.run_stage("dedup-summaries")?),
        Command::Determine => print_report(&pipeline(cli)?.run_stage("determine")?),
        Command::Translate => print_report(&pipeline(cli)?.run_stage("translate")?),
        Command::RunAll { translate } => {
            let p = pipeline(cli)?;
            for report in p.run_all(*translate)? {
                print_report(&report);
            }
            for (stage, inputs, kept, dropped, quarantined) in p.reconcile()? {
                println!(
                    "{stage}: {inputs} in = {kept} kept + {dropped} dropped + {quarantined} quarantined"
                );
            }
            let usage = esgpipe::providers::usage::snapshot();
            println!(
                "chat usage: {} requests, {} cache hits, ~{} prompt / ~{} response tokens",
                usage.requests, usage.cache_hits, usage.prompt_tokens, usage.response_tokens
            );
        }
        Command::Report { kind, input, annotations, out, plots, company, window_days } => {
            run_report(cli, *kind, input, annotations, out, *plots, company, *window_days)?;
        }
        Command::SampleEval { input, out, seed } => {
            let records = dataset_input(cli, input)?;
            std::fs::create_dir_all(out)?;
            let seed = seed
                .or_else(|| load_config(cli).ok().map(|c| c.run.seed))
                .unwrap_or(0);
            let summary_sample = evaluation::sample_summary_eval(&records, seed);
            write_sample_csv(out.join("summary_eval_samples.csv"), &summary_sample)?;
            let embedder = resolve_embedder(cli)?;
            let texts: Vec<String> = records.iter().map(|r| r.summary.clone()).collect();
            let embeddings = embedder.embed_texts(&texts)?;
            let class_sample =
                evaluation::sample_classification_eval(&records, &embeddings, seed);
            write_sample_csv(out.join("classification_eval_samples.csv"), &class_sample)?;
            println!(
                "summary sample: {} ids; classification sample: {} ids -> {}",
                summary_sample.len(),
                class_sample.len(),
                out.display()
            );
        }
        Command::Evaluate { annotations, input, out } => {
            let records = dataset_input(cli, input)?;
            let notes = evaluation::load_annotations(annotations)?;
            std::fs::create_dir_all(out)?;
            let report = evaluation::evaluate_against_dataset(&records, &notes)?;
            report::write_eval_csv(out.join("eval_metrics.csv"), &report)?;
            std::fs::write(out.join("eval_metrics.txt"), report::format_eval_text(&report))?;
            print_eval(&report);
        }
        Command::SynthCorpus { out, articles, seed } => {
            std::fs::create_dir_all(out)?;
            let corpus = synthetic::mock_corpus(*articles, *seed);
            esgpipe::corpus::write_corpus(out.join("corpus.jsonl"), &corpus.articles)?;
            let companies = toml::to_string(&CompaniesOut { companies: corpus.companies })
                .map_err(|e| Error::config(e.to_string()))?;
            std::fs::write(out.join("companies.toml"), companies)?;
            println!("wrote {} articles to {}", articles, out.display());
        }
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct CompaniesOut {
    companies: Vec<esgpipe::corpus::CompanySpec>,
}

fn resolve_embedder(cli: &Cli) -> Result<std::sync::Arc<dyn Embedder>> {
    if let Ok(cfg) = load_config(cli) {
        if cfg.paths.is_some() {
            let companies = esgpipe::corpus::load_company_specs(&cfg.paths()?.companies)?;
            let set = esgpipe::config::build_providers(
                &cfg,
                &companies,
                esgpipe::pipeline::NON_ORG_MARKER,
                cli.mock,
            )?;
            return Ok(set.embedder);
        }
    }
    Ok(std::sync::Arc::new(MockEmbedder::new(0, 32)))
}

fn write_sample_csv(path: PathBuf, sample: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["sample_id"])?;
    for id in sample {
        w.write_record([id])?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_report(
    cli: &Cli,
    kind: ReportKind,
    input: &Option<PathBuf>,
    annotations: &Option<PathBuf>,
    out: &PathBuf,
    plots: bool,
    company: &Option<String>,
    window_days: u32,
) -> Result<()> {
    let records = dataset_input(cli, input)?;
    std::fs::create_dir_all(out)?;
    match kind {
        ReportKind::Stats => {
            let stats = analytics::aggregate_counts(&records);
            report::write_stats_csv(out.join("stats.csv"), &stats)?;
            report::write_company_totals_csv(out.join("company_totals.csv"), &stats)?;
            if plots {
                plot::plot_company_aspects(out.join("company_aspects.png"), &stats)?;
            }
            println!("stats: {} records, {} companies -> {}", records.len(), stats.per_company.len(), out.display());
        }
        ReportKind::Timeseries => {
            report::write_weekly_csv(out.join("weekly_counts.csv"), &records)?;
            report::write_moving_average_csv(
                out.join("sentiment_moving_average.csv"),
                &records,
                window_days,
            )?;
            if plots {
                plot::plot_weekly(out.join("weekly_counts.png"), &analytics::weekly_counts(&records))?;
                plot::plot_moving_average(
                    out.join("sentiment_moving_average.png"),
                    &analytics::sentiment_moving_average(&records, window_days),
                )?;
            }
            println!("timeseries -> {}", out.display());
        }
        ReportKind::Relevance => {
            report::write_relevance_csv(out.join("relevance_histogram.csv"), &records)?;
            println!("relevance histogram -> {}", out.display());
        }
        ReportKind::Topics => {
            let embedder = resolve_embedder(cli)?;
            let cfg = load_config(cli).ok();
            let cluster_cfg = cfg
                .map(|c| {
                    let mut cc = c.clustering;
                    cc.seed = c.run.seed;
                    cc
                })
                .unwrap_or_default();
            let companies: Vec<String> = match company {
                Some(c) => vec![c.clone()],
                None => {
                    let mut names: Vec<String> =
                        records.iter().map(|r| r.company.clone()).collect();
                    names.sort();
                    names.dedup();
                    names
                }
            };
            for name in companies {
                let subset: Vec<DatasetRecord> =
                    records.iter().filter(|r| r.company == name).cloned().collect();
                if subset.is_empty() {
                    continue;
                }
                let names = vec![name.clone()];
                let documents: Vec<String> = subset
                    .iter()
                    .map(|r| topics::augment_text(&r.summary, &r.keywords, &names))
                    .collect();
                let vectors = embedder.embed_texts(&documents)?;
                let labels = topics::cluster_documents(&vectors, &cluster_cfg);
                let report_rows = topics::topic_report(&subset, &documents, &labels, 10);
                let slug: String = name
                    .chars()
                    .map(|c| if c.is_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
                    .collect();
                report::write_topics_csv(out.join(format!("topics_{slug}.csv")), &name, &report_rows)?;
                report::write_topic_monthly_csv(
                    out.join(format!("topics_{slug}_monthly.csv")),
                    &report_rows,
                )?;
                println!("topics for {name}: {} clusters -> {}", report_rows.len(), out.display());
            }
        }
        ReportKind::Eval => {
            let annotations_path = annotations
                .as_ref()
                .ok_or_else(|| Error::config("report eval needs --annotations <file>"))?;
            let notes = evaluation::load_annotations(annotations_path)?;
            let report = evaluation::evaluate_against_dataset(&records, &notes)?;
            report::write_eval_csv(out.join("eval_metrics.csv"), &report)?;
            std::fs::write(out.join("eval_metrics.txt"), report::format_eval_text(&report))?;
            print_eval(&report);
        }
    }
    Ok(())
}

fn print_eval(report: &EvaluationSummary) {
    if let Some(v) = report.summary_all_correct_ratio {
        println!("summary correct by all annotators: {:.1}%", v * 100.0);
    }
    if let Some(r) = &report.relevancy {
        println!(
            "relevancy agreement: all={:.1}% majority={:.1}% any={:.1}% over {} samples",
            r.all * 100.0,
            r.majority * 100.0,
            r.any * 100.0,
            r.samples
        );
    }
    if let Some(v) = report.kappa_sentiment {
        println!("fleiss kappa (sentiment): {v:.3}");
    }
    if let Some(v) = report.kappa_aspect {
        println!("fleiss kappa (aspect): {v:.3}");
    }
    if let Some(v) = report.sentiment_accuracy {
        println!("sentiment accuracy vs gold: {:.1}%", v * 100.0);
    }
    if let Some(v) = report.aspect_accuracy {
        println!("aspect accuracy vs gold: {:.1}%", v * 100.0);
    }
    for row in &report.relevance_table {
        println!(
            "score {}: irrelevant by >=1 annotator {}/{} ({:.2})",
            row.score, row.flagged, row.total, row.ratio
        );
    }
}
