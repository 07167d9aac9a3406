//! `scia11y`: render papers to accessible HTML, batch-render corpora, audit
//! PDF compliance reports and work with evaluation records.
//!
//! Exit codes: 0 success, 1 batch documents failed or an unexpected error,
//! 2 invalid or unreadable input, 3 a render failed its self-audit.

mod audit;
mod batch;
mod evaluate;
mod fsutil;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use scia11y_core::error::EvaluationError;
use scia11y_core::evaluation::{
    aggregate_errors, agreement_csv, agreement_suite, readability_by_field, PrimaryAnnotator,
};
use scia11y_core::html::{self_audit, EmitOptions};
use scia11y_core::pipeline::RenderOptions;
use scia11y_core::stitch::MergeOptions;

use crate::fsutil::{write_atomic, write_json};
use crate::render::{failed_criteria, render_files, RenderFailure};

const EXIT_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_AUDIT: u8 = 3;

#[derive(Parser)]
#[command(name = "scia11y", version, about = "Accessible HTML renders of scientific papers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render one paper from its full-text JSON and figure manifest.
    Render(RenderArgs),
    /// Render every paper listed by a job manifest, resuming earlier runs.
    Batch(BatchArgs),
    /// Score a directory of accessibility-checker reports.
    Audit(AuditArgs),
    /// Corpus statistics over the records written by `audit`.
    Stats(StatsArgs),
    /// Validate evaluation records and write the aggregate tables.
    Evaluate(EvaluateArgs),
    /// Inter-rater agreement between two annotators' records.
    Agreement(AgreementArgs),
    /// Run the accessibility self-audit on existing HTML files.
    SelfAudit(SelfAuditArgs),
}

#[derive(Args)]
struct RenderArgs {
    /// Full-text extraction JSON.
    #[arg(long)]
    fulltext: PathBuf,
    /// Figure manifest JSON; when absent or missing, objects render as
    /// placeholders.
    #[arg(long)]
    figures: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short)]
    out: PathBuf,
    /// Directory that image paths in the manifest are relative to.
    #[arg(long)]
    assets: Option<PathBuf>,
    /// Prefix for image `src` attributes.
    #[arg(long, default_value = "assets/")]
    assets_prefix: String,
    /// Embed images as data URIs (requires --assets).
    #[arg(long)]
    inline_images: bool,
    /// Language tag for the document.
    #[arg(long, default_value = "en")]
    lang: String,
    /// Merge a figure manifest whose paper id differs from the full text.
    #[arg(long)]
    allow_id_mismatch: bool,
}

#[derive(Args)]
struct BatchArgs {
    /// Job manifest (TOML).
    manifest: PathBuf,
    /// Output directory, overriding the manifest.
    #[arg(long, env = "SCIA11Y_OUTPUT_DIR")]
    output: Option<PathBuf>,
    /// Number of worker threads, overriding the manifest.
    #[arg(long, env = "SCIA11Y_PARALLELISM")]
    parallelism: Option<usize>,
    /// Keep going after a document fails.
    #[arg(long, env = "SCIA11Y_CONTINUE_ON_ERROR", num_args = 0..=1, default_missing_value = "true")]
    continue_on_error: Option<bool>,
    /// Process at most this many pending documents in this run.
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct AuditArgs {
    /// Directory of checker reports (JSON or HTML), one per paper.
    #[arg(long)]
    reports: PathBuf,
    /// CSV with paper_id, year, field_of_study and creator columns.
    #[arg(long)]
    metadata: Option<PathBuf>,
    #[arg(long, short)]
    out: PathBuf,
    /// Software cluster mapping (TOML) replacing the bundled one.
    #[arg(long)]
    mapping: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// records.json written by `audit`.
    #[arg(long)]
    records: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// Include the catch-all cluster in the between-cluster tests.
    #[arg(long)]
    include_other: bool,
    /// Cluster whose share is correlated with compliance across fields.
    #[arg(long, default_value = "Microsoft Word")]
    word_cluster: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Primary {
    First,
    Random,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Record directory or CSV export.
    #[arg(long)]
    records: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
    /// CSV with paper_id and field_of_study columns.
    #[arg(long)]
    fields: Option<PathBuf>,
    /// Which record to use for papers graded more than once.
    #[arg(long, value_enum, default_value = "first")]
    primary: Primary,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AgreementArgs {
    /// First annotator's records (directory or CSV).
    a: PathBuf,
    /// Second annotator's records (directory or CSV).
    b: PathBuf,
    /// Also write the table as JSON to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SelfAuditArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Render(args) => cmd_render(args),
        Command::Batch(args) => cmd_batch(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Agreement(args) => cmd_agreement(args),
        Command::SelfAudit(args) => cmd_self_audit(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}

fn input_error(msg: impl std::fmt::Display) -> Result<ExitCode> {
    eprintln!("error: {msg}");
    Ok(ExitCode::from(EXIT_INPUT))
}

fn cmd_render(args: RenderArgs) -> Result<ExitCode> {
    let opts = RenderOptions {
        merge: MergeOptions {
            allow_id_mismatch: args.allow_id_mismatch,
            lang: args.lang,
        },
        emit: EmitOptions {
            lang: None,
            assets_prefix: args.assets_prefix,
            inline_images: args.inline_images,
            asset_root: args.assets,
        },
    };
    match render_files(&args.fulltext, args.figures.as_deref(), &args.out, None, &opts) {
        Ok((output, written)) => {
            eprint!("{}", output.diagnostics.to_json_lines());
            println!("{}", written.html.display());
            if output.audit.passed {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("error: self-audit failed: {}", failed_criteria(&output.audit));
                Ok(ExitCode::from(EXIT_AUDIT))
            }
        }
        Err(RenderFailure::Input(msg)) => input_error(msg),
        Err(RenderFailure::Io(e)) => Err(e),
    }
}

fn cmd_batch(args: BatchArgs) -> Result<ExitCode> {
    let overrides = batch::Overrides {
        output_dir: args.output,
        parallelism: args.parallelism,
        continue_on_error: args.continue_on_error,
        limit: args.limit,
    };
    let job = match batch::JobManifest::load(&args.manifest, overrides) {
        Ok(job) => job,
        Err(e) => return input_error(format!("{e:#}")),
    };
    let summary = batch::run(&job)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if summary.failed > 0 && !job.continue_on_error {
        return Ok(ExitCode::from(EXIT_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_audit(args: AuditArgs) -> Result<ExitCode> {
    let mapping = match audit::load_mapping(args.mapping.as_deref()) {
        Ok(m) => m,
        Err(e) => return input_error(format!("{e:#}")),
    };
    let metadata = match audit::read_metadata_file(args.metadata.as_deref()) {
        Ok(m) => m,
        Err(e) => return input_error(format!("{e:#}")),
    };
    let (records, summary) = match audit::collect_records(&args.reports, &metadata, &mapping) {
        Ok(r) => r,
        Err(e) => return input_error(format!("{e:#}")),
    };
    audit::write_tables(&args.out, &records, &mapping)?;
    write_json(&args.out.join("summary.json"), &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if summary.mostly_unreadable() {
        return input_error(format!(
            "{} of {} reports unreadable",
            summary.unreadable.len(),
            summary.reports
        ));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(args: StatsArgs) -> Result<ExitCode> {
    let (mapping, records) = match (
        audit::load_mapping(args.mapping.as_deref()),
        audit::read_records(&args.records),
    ) {
        (Ok(m), Ok(r)) => (m, r),
        (Err(e), _) | (_, Err(e)) => return input_error(format!("{e:#}")),
    };
    if records.is_empty() {
        return input_error("no records");
    }
    let stats = audit::stats(&records, &mapping, args.include_other, &args.word_cluster);
    write_json(&args.out.join("stats.json"), &stats)?;
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<ExitCode> {
    let records = match evaluate::load(&args.records) {
        Ok(Ok(r)) => r,
        Ok(Err(invalid)) => return input_error(invalid),
        Err(e) => return input_error(format!("{e:#}")),
    };
    let fields = match evaluate::read_field_map(args.fields.as_deref()) {
        Ok(f) => f,
        Err(e) => return input_error(format!("{e:#}")),
    };
    let policy = match args.primary {
        Primary::First => PrimaryAnnotator::First,
        Primary::Random => PrimaryAnnotator::Random { seed: args.seed },
    };
    let errors = match aggregate_errors(&records, policy) {
        Ok(t) => t,
        Err(EvaluationError::EmptyInput) => return input_error("no usable (non-skipped) records"),
        Err(e) => return Err(e.into()),
    };
    let readability = readability_by_field(&records, &fields, policy)?;
    write_atomic(&args.out.join("errors.csv"), errors.to_csv().as_bytes())?;
    write_json(&args.out.join("errors.json"), &errors)?;
    write_atomic(&args.out.join("readability.csv"), readability.to_csv().as_bytes())?;
    write_json(&args.out.join("readability.json"), &readability)?;
    println!(
        "{} papers evaluated, {} skipped",
        errors.n_papers, errors.skipped_papers
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_agreement(args: AgreementArgs) -> Result<ExitCode> {
    let mut sets = Vec::new();
    for path in [&args.a, &args.b] {
        match evaluate::load(path) {
            Ok(Ok(r)) => sets.push(r),
            Ok(Err(invalid)) => return input_error(invalid),
            Err(e) => return input_error(format!("{e:#}")),
        }
    }
    let rows = match agreement_suite(&sets[0], &sets[1]) {
        Ok(rows) => rows,
        Err(e @ (EvaluationError::NoOverlap | EvaluationError::EmptyInput)) => return input_error(e),
        Err(e) => return Err(e.into()),
    };
    print!("{}", agreement_csv(&rows));
    if let Some(path) = args.json {
        write_json(&path, &rows)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_self_audit(args: SelfAuditArgs) -> Result<ExitCode> {
    let mut all_passed = true;
    for path in &args.files {
        let html = match std::fs::read_to_string(path) {
            Ok(h) => h,
            Err(e) => return input_error(format!("reading {}: {e}", path.display())),
        };
        let report = self_audit(&html);
        all_passed &= report.passed;
        let line = serde_json::json!({ "file": path.display().to_string(), "report": report });
        println!("{}", serde_json::to_string(&line).context("serializing audit report")?);
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_AUDIT)
    })
}
