//! Compliance audit over a directory of checker reports, and corpus
//! statistics over the resulting records.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use scia11y_core::compliance::{
    aggregate, aggregate_csv, build_record, corpus_stats, criterion_table, histogram, histogram_csv, parse_report,
    read_metadata, software_distribution, ComplianceRecord, CorpusStats, GroupBy, PaperMetadata, SoftwareMapping,
};

use crate::fsutil::{write_atomic, write_json};

pub const RECORDS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordsFile {
    pub schema_version: u32,
    pub records: Vec<ComplianceRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Unreadable {
    pub file: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditSummary {
    pub schema_version: u32,
    pub reports: usize,
    pub records: usize,
    pub unreadable: Vec<Unreadable>,
}

impl AuditSummary {
    /// More than half of the reports could not be read (or there were none).
    pub fn mostly_unreadable(&self) -> bool {
        self.reports == 0 || self.unreadable.len() * 2 > self.reports
    }
}

pub fn load_mapping(path: Option<&Path>) -> Result<SoftwareMapping> {
    match path {
        None => Ok(SoftwareMapping::bundled().clone()),
        Some(p) => {
            let raw = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            SoftwareMapping::from_toml(&raw).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

fn report_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'));
        if path.is_file() && !hidden {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Paper id from a report file name: everything before the first dot.
fn id_from_file(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    name.split('.').next().unwrap_or(name).to_string()
}

/// Parses every report and joins it with the metadata. Unreadable reports
/// are listed in the summary rather than failing the run.
pub fn collect_records(
    reports_dir: &Path,
    metadata: &[PaperMetadata],
    mapping: &SoftwareMapping,
) -> Result<(Vec<ComplianceRecord>, AuditSummary)> {
    let by_id: BTreeMap<&str, &PaperMetadata> = metadata.iter().map(|m| (m.paper_id.as_str(), m)).collect();
    let files = report_files(reports_dir)?;
    let mut records = Vec::new();
    let mut unreadable = Vec::new();
    for path in &files {
        let raw = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        match parse_report(&raw) {
            Ok(parsed) => {
                let id = parsed.paper_id.unwrap_or_else(|| id_from_file(path));
                records.push(build_record(
                    &id,
                    parsed.criteria,
                    by_id.get(id.as_str()).copied(),
                    mapping,
                ));
            }
            Err(e) => unreadable.push(Unreadable {
                file: path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                reason: e.to_string(),
            }),
        }
    }
    let summary = AuditSummary {
        schema_version: RECORDS_SCHEMA_VERSION,
        reports: files.len(),
        records: records.len(),
        unreadable,
    };
    Ok((records, summary))
}

/// Writes the records, the criterion table, the score histogram, per-year,
/// per-field and per-software tables and the software distribution.
pub fn write_tables(out_dir: &Path, records: &[ComplianceRecord], mapping: &SoftwareMapping) -> Result<()> {
    write_json(
        &out_dir.join("records.json"),
        &RecordsFile {
            schema_version: RECORDS_SCHEMA_VERSION,
            records: records.to_vec(),
        },
    )?;
    if records.is_empty() {
        return Ok(());
    }
    let table = criterion_table(records)?;
    write_atomic(&out_dir.join("criteria.csv"), table.to_csv().as_bytes())?;
    write_json(&out_dir.join("criteria.json"), &table)?;
    write_atomic(
        &out_dir.join("histogram.csv"),
        histogram_csv(&histogram(records)).as_bytes(),
    )?;
    for (by, name) in [
        (GroupBy::Year, "by_year"),
        (GroupBy::FieldOfStudy, "by_field"),
        (GroupBy::SoftwareCluster, "by_software"),
    ] {
        let rows = aggregate(records, by, mapping)?;
        write_atomic(&out_dir.join(format!("{name}.csv")), aggregate_csv(&rows).as_bytes())?;
    }
    let dist = software_distribution(records, mapping);
    let mut csv = String::from("software,count,percent\n");
    for r in &dist {
        csv.push_str(&format!("{},{},{:.1}%\n", r.label, r.count, r.percent));
    }
    write_atomic(&out_dir.join("software.csv"), csv.as_bytes())?;
    Ok(())
}

pub fn read_metadata_file(path: Option<&Path>) -> Result<Vec<PaperMetadata>> {
    let Some(path) = path else { return Ok(Vec::new()) };
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_metadata(file).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_records(path: &Path) -> Result<Vec<ComplianceRecord>> {
    let raw = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let file: RecordsFile = serde_json::from_slice(&raw).with_context(|| format!("parsing {}", path.display()))?;
    anyhow::ensure!(
        file.schema_version == RECORDS_SCHEMA_VERSION,
        "unsupported records schema_version {}",
        file.schema_version
    );
    Ok(file.records)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsFile {
    pub schema_version: u32,
    pub n: usize,
    pub include_other: bool,
    #[serde(flatten)]
    pub stats: CorpusStats,
}

pub fn stats(
    records: &[ComplianceRecord],
    mapping: &SoftwareMapping,
    include_other: bool,
    word_cluster: &str,
) -> StatsFile {
    StatsFile {
        schema_version: RECORDS_SCHEMA_VERSION,
        n: records.len(),
        include_other,
        stats: corpus_stats(records, mapping, include_other, word_cluster),
    }
}
