use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use scia11y_core::diagnostics::Warning;
use scia11y_core::error::RenderError;
use scia11y_core::html::AuditReport;
use scia11y_core::pipeline::{render_paper, RenderOptions, RenderOutput};

use crate::fsutil::{safe_name, write_atomic, write_json};

pub const AUDIT_SCHEMA_VERSION: u32 = 1;

/// Contents of `<paper_id>.audit.json`.
#[derive(Debug, Serialize)]
pub struct AuditFile<'a> {
    pub schema_version: u32,
    pub paper_id: &'a str,
    #[serde(flatten)]
    pub audit: &'a AuditReport,
    pub warnings: &'a [Warning],
}

/// Why a paper did not render.
#[derive(Debug)]
pub enum RenderFailure {
    /// An input file is missing or unreadable, or its contents are invalid.
    Input(String),
    Io(anyhow::Error),
}

impl std::fmt::Display for RenderFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RenderFailure::Input(msg) => f.write_str(msg),
            RenderFailure::Io(e) => write!(f, "{e:#}"),
        }
    }
}

/// Paths of the three files written for one paper.
#[derive(Debug, Clone)]
pub struct Written {
    pub html: PathBuf,
    pub render_json: PathBuf,
    pub audit_json: PathBuf,
}

/// Reads the inputs, renders, and writes `<name>.html`, `<name>.render.json`
/// and `<name>.audit.json` into `out_dir`. Nothing is written when the inputs
/// cannot be parsed.
pub fn render_files(
    fulltext: &Path,
    figures: Option<&Path>,
    out_dir: &Path,
    name: Option<&str>,
    opts: &RenderOptions,
) -> Result<(RenderOutput, Written), RenderFailure> {
    let raw =
        std::fs::read(fulltext).map_err(|e| RenderFailure::Input(format!("reading {}: {e}", fulltext.display())))?;
    let figs = figures
        .filter(|p| p.exists())
        .map(|p| std::fs::read(p).map_err(|e| RenderFailure::Input(format!("reading {}: {e}", p.display()))))
        .transpose()?;
    let output = render_paper(&raw, figs.as_deref(), opts).map_err(|e| match e {
        RenderError::FullText(e) => RenderFailure::Input(format!("{}: {e}", fulltext.display())),
        other => RenderFailure::Input(other.to_string()),
    })?;
    let name = name.map_or_else(|| safe_name(&output.tree.metadata.paper_id), str::to_string);
    let written = write_outputs(&output, out_dir, &name).map_err(RenderFailure::Io)?;
    Ok((output, written))
}

fn write_outputs(output: &RenderOutput, out_dir: &Path, name: &str) -> Result<Written> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let written = Written {
        html: out_dir.join(format!("{name}.html")),
        render_json: out_dir.join(format!("{name}.render.json")),
        audit_json: out_dir.join(format!("{name}.audit.json")),
    };
    write_json(&written.render_json, &output.tree)?;
    write_json(
        &written.audit_json,
        &AuditFile {
            schema_version: AUDIT_SCHEMA_VERSION,
            paper_id: &output.tree.metadata.paper_id,
            audit: &output.audit,
            warnings: &output.diagnostics.warnings,
        },
    )?;
    write_atomic(&written.html, output.html.html.as_bytes())?;
    Ok(written)
}

/// Names of the audit criteria that failed, comma separated.
pub fn failed_criteria(audit: &AuditReport) -> String {
    audit
        .criteria
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{:?}", c.criterion))
        .collect::<Vec<_>>()
        .join(", ")
}
