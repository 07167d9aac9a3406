//! Resumable corpus rendering driven by a job manifest.
//!
//! Every document is identified by the file stem of its full-text JSON. Its
//! status lives in `<output>/ledger.jsonl`, an append-only log whose last
//! entry per document wins. Workers render documents in parallel; a single
//! writer appends ledger entries in input order, so the ledger and every
//! other output are independent of the degree of parallelism.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use scia11y_core::html::{escape_attr, escape_text, EmitOptions};
use scia11y_core::pipeline::RenderOptions;
use scia11y_core::stitch::{MergeOptions, RenderBlock, RenderTree};

use crate::fsutil::{write_atomic, write_json};
use crate::render::{failed_criteria, render_files, RenderFailure};

pub const JOB_SCHEMA_VERSION: u32 = 1;
pub const LEDGER_FILE: &str = "ledger.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";
pub const PAPERS_DIR: &str = "papers";
pub const ASSETS_DIR: &str = "assets";

/// The `[job]` manifest as written on disk. Relative paths resolve against
/// the manifest's directory.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    #[serde(default)]
    pub schema_version: Option<u32>,
    pub fulltext_dir: PathBuf,
    #[serde(default)]
    pub figures_dir: Option<PathBuf>,
    #[serde(default)]
    pub assets_dir: Option<PathBuf>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub parallelism: Option<usize>,
    #[serde(default)]
    pub continue_on_error: Option<bool>,
    #[serde(default)]
    pub inline_images: Option<bool>,
    #[serde(default)]
    pub lang: Option<String>,
}

/// Settings that may override the manifest, from flags or the environment.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub parallelism: Option<usize>,
    pub continue_on_error: Option<bool>,
    /// Process at most this many pending documents, then stop.
    pub limit: Option<usize>,
}

/// A fully resolved job.
#[derive(Debug, Clone)]
pub struct JobManifest {
    pub fulltext_dir: PathBuf,
    pub figures_dir: Option<PathBuf>,
    pub assets_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub parallelism: usize,
    pub continue_on_error: bool,
    pub inline_images: bool,
    pub lang: String,
    pub limit: Option<usize>,
}

impl JobManifest {
    pub fn load(path: &Path, overrides: Overrides) -> Result<Self> {
        let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: JobFile = toml::from_str(&raw).with_context(|| format!("parsing {}", path.display()))?;
        if let Some(v) = file.schema_version.filter(|&v| v != JOB_SCHEMA_VERSION) {
            bail!("unsupported job schema_version {v}");
        }
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let output_dir = overrides
            .output_dir
            .or(file.output_dir.map(resolve))
            .context("no output directory: set output_dir in the manifest or pass --output")?;
        let parallelism = overrides
            .parallelism
            .or(file.parallelism)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if parallelism == 0 {
            bail!("parallelism must be at least 1");
        }
        Ok(Self {
            fulltext_dir: resolve(file.fulltext_dir),
            figures_dir: file.figures_dir.map(resolve),
            assets_dir: file.assets_dir.map(resolve),
            output_dir,
            parallelism,
            continue_on_error: overrides.continue_on_error.or(file.continue_on_error).unwrap_or(false),
            inline_images: file.inline_images.unwrap_or(false),
            lang: file.lang.unwrap_or_else(|| "en".to_string()),
            limit: overrides.limit,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DocStatus {
    Pending,
    Done,
    Failed { reason: String },
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub document: String,
    #[serde(flatten)]
    pub status: DocStatus,
}

/// Last status per document, from the ledger file if it exists.
pub fn read_ledger(path: &Path) -> Result<BTreeMap<String, DocStatus>> {
    let mut out = BTreeMap::new();
    let Ok(raw) = std::fs::read_to_string(path) else {
        return Ok(out);
    };
    let last = raw.lines().count();
    for (i, line) in raw.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        match serde_json::from_str::<LedgerEntry>(line) {
            Ok(e) => {
                out.insert(e.document, e.status);
            }
            // A line cut short by an interrupted run is ignored; that
            // document is simply processed again.
            Err(_) if i + 1 == last => {}
            Err(e) => bail!("{}:{}: {e}", path.display(), i + 1),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub schema_version: u32,
    pub total: usize,
    pub done: usize,
    pub failed: usize,
    pub skipped: usize,
    pub pending: usize,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub document: String,
    pub reason: String,
}

/// One structured log line per document.
#[derive(Serialize)]
struct LogLine<'a> {
    document: &'a str,
    #[serde(flatten)]
    status: &'a DocStatus,
    millis: u128,
    warnings: usize,
    audit_passed: Option<bool>,
}

struct Outcome {
    status: DocStatus,
    millis: u128,
    warnings: usize,
    audit_passed: Option<bool>,
}

fn list_documents(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut docs = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                docs.push((stem.to_string(), path.clone()));
            }
        }
    }
    docs.sort();
    Ok(docs)
}

fn process(job: &JobManifest, document: &str, fulltext: &Path, opts: &RenderOptions) -> Outcome {
    let started = Instant::now();
    let figures = job.figures_dir.as_ref().map(|d| d.join(format!("{document}.json")));
    let papers = job.output_dir.join(PAPERS_DIR);
    let result = render_files(fulltext, figures.as_deref(), &papers, Some(document), opts);
    let (status, warnings, audit_passed) = match result {
        Ok((output, _)) => {
            let copied = copy_assets(job, &output.tree);
            let status = match copied {
                Err(e) => DocStatus::Failed {
                    reason: format!("copying assets: {e:#}"),
                },
                Ok(()) if output.audit.passed => DocStatus::Done,
                Ok(()) => DocStatus::Failed {
                    reason: format!("self-audit failed: {}", failed_criteria(&output.audit)),
                },
            };
            (status, output.diagnostics.len(), Some(output.audit.passed))
        }
        Err(RenderFailure::Input(msg)) if msg.contains("empty document") => {
            (DocStatus::Skipped { reason: msg }, 0, None)
        }
        Err(e) => (DocStatus::Failed { reason: e.to_string() }, 0, None),
    };
    Outcome {
        status,
        millis: started.elapsed().as_millis(),
        warnings,
        audit_passed,
    }
}

/// Copies the images a render references into the bundle's assets folder.
fn copy_assets(job: &JobManifest, tree: &RenderTree) -> Result<()> {
    let Some(assets) = job.assets_dir.as_ref().filter(|_| !job.inline_images) else {
        return Ok(());
    };
    for block in &tree.body {
        if let RenderBlock::Object(o) = block {
            let src = assets.join(&o.image_path);
            if !src.is_file() {
                continue;
            }
            let dest = job.output_dir.join(ASSETS_DIR).join(&o.image_path);
            let bytes = std::fs::read(&src).with_context(|| format!("reading {}", src.display()))?;
            write_atomic(&dest, &bytes)?;
        }
    }
    Ok(())
}

pub fn run(job: &JobManifest) -> Result<BatchSummary> {
    let docs = list_documents(&job.fulltext_dir)?;
    std::fs::create_dir_all(&job.output_dir)?;
    let ledger_path = job.output_dir.join(LEDGER_FILE);
    let mut state = read_ledger(&ledger_path)?;

    let mut pending: Vec<&(String, PathBuf)> = docs
        .iter()
        .filter(|(d, _)| !matches!(state.get(d), Some(DocStatus::Done | DocStatus::Skipped { .. })))
        .collect();
    if let Some(limit) = job.limit {
        pending.truncate(limit);
    }

    let opts = RenderOptions {
        merge: MergeOptions {
            lang: job.lang.clone(),
            ..MergeOptions::default()
        },
        emit: EmitOptions {
            lang: None,
            assets_prefix: format!("../{ASSETS_DIR}/"),
            inline_images: job.inline_images,
            asset_root: job.assets_dir.clone(),
        },
    };

    let mut ledger = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&ledger_path)
        .with_context(|| format!("opening {}", ledger_path.display()))?;
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<(usize, Outcome)>();
    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..job.parallelism.min(pending.len().max(1)) {
            let tx = tx.clone();
            let (next, stop, pending, opts) = (&next, &stop, &pending, &opts);
            scope.spawn(move || loop {
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some((document, path)) = pending.get(i) else { break };
                let outcome = process(job, document, path, opts);
                if matches!(outcome.status, DocStatus::Failed { .. }) && !job.continue_on_error {
                    stop.store(true, Ordering::SeqCst);
                }
                if tx.send((i, outcome)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        // Commit in input order; results that arrive early wait here.
        let mut buffered: BTreeMap<usize, Outcome> = BTreeMap::new();
        let mut committed = 0;
        for (i, outcome) in rx {
            buffered.insert(i, outcome);
            while let Some(outcome) = buffered.remove(&committed) {
                let document = &pending[committed].0;
                let entry = LedgerEntry {
                    document: document.clone(),
                    status: outcome.status,
                };
                writeln!(ledger, "{}", serde_json::to_string(&entry)?)?;
                ledger.flush()?;
                let log = LogLine {
                    document,
                    status: &entry.status,
                    millis: outcome.millis,
                    warnings: outcome.warnings,
                    audit_passed: outcome.audit_passed,
                };
                eprintln!("{}", serde_json::to_string(&log)?);
                state.insert(entry.document, entry.status);
                committed += 1;
            }
        }
        Ok(())
    })?;

    let names: BTreeSet<&str> = docs.iter().map(|(d, _)| d.as_str()).collect();
    let mut summary = BatchSummary {
        schema_version: JOB_SCHEMA_VERSION,
        total: docs.len(),
        ..BatchSummary::default()
    };
    for name in &names {
        match state.get(*name).unwrap_or(&DocStatus::Pending) {
            DocStatus::Pending => summary.pending += 1,
            DocStatus::Done => summary.done += 1,
            DocStatus::Skipped { .. } => summary.skipped += 1,
            DocStatus::Failed { reason } => {
                summary.failed += 1;
                summary.failures.push(Failure {
                    document: name.to_string(),
                    reason: reason.clone(),
                });
            }
        }
    }
    let done: Vec<&str> = names
        .iter()
        .copied()
        .filter(|n| state.get(*n) == Some(&DocStatus::Done))
        .collect();
    write_atomic(
        &job.output_dir.join("index.html"),
        index_html(&job.output_dir, &done).as_bytes(),
    )?;
    write_json(&job.output_dir.join(SUMMARY_FILE), &summary)?;
    Ok(summary)
}

/// Static landing page linking every rendered paper by title.
fn index_html(output_dir: &Path, documents: &[&str]) -> String {
    let mut items = String::new();
    for doc in documents {
        let title = std::fs::read(output_dir.join(PAPERS_DIR).join(format!("{doc}.render.json")))
            .ok()
            .and_then(|raw| serde_json::from_slice::<RenderTree>(&raw).ok())
            .map(|t| t.metadata.title)
            .filter(|t| !t.trim().is_empty())
            .unwrap_or_else(|| doc.to_string());
        items.push_str(&format!(
            "<li><a href=\"{PAPERS_DIR}/{}.html\">{}</a></li>\n",
            escape_attr(doc),
            escape_text(&title)
        ));
    }
    format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n\
         <meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">\n\
         <title>Paper renders</title>\n</head>\n<body>\n<main>\n<h1>Paper renders</h1>\n\
         <p>{} papers.</p>\n<ul>\n{items}</ul>\n</main>\n</body>\n</html>\n",
        documents.len()
    )
}
