use std::path::Path;

use scia11y_core::compliance::{CheckStatus, ComplianceRecord, Criterion, CriterionSet};

fn rule_name(c: Criterion) -> &'static str {
    match c {
        Criterion::AltText => "Figures alternate text",
        Criterion::TableHeaders => "Headers",
        Criterion::TaggedPdf => "Tagged PDF",
        Criterion::DefaultLanguage => "Primary language",
        Criterion::TabOrder => "Tab order",
    }
}

fn status_word(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Passed => "Passed",
        CheckStatus::Failed => "Failed",
        CheckStatus::NeedsManualCheck => "Needs manual check",
    }
}

pub fn json_report(paper_id: &str, criteria: &CriterionSet) -> String {
    let rules: Vec<serde_json::Value> = Criterion::ALL
        .iter()
        .map(|&c| serde_json::json!({ "name": rule_name(c), "status": status_word(criteria.get(c)) }))
        .collect();
    serde_json::json!({ "schema_version": 1, "paper_id": paper_id, "rules": rules }).to_string()
}

/// Writes one JSON report per record and the matching metadata CSV.
pub fn write_corpus(dir: &Path, records: &[ComplianceRecord]) -> std::path::PathBuf {
    let reports = dir.join("reports");
    std::fs::create_dir_all(&reports).unwrap();
    let metadata = dir.join("metadata.csv");
    let mut w = csv::Writer::from_path(&metadata).unwrap();
    w.write_record([
        "paper_id",
        "year",
        "field_of_study",
        "xmp_creator_tool",
        "docinfo_creator_tool",
        "producer",
    ])
    .unwrap();
    for r in records {
        std::fs::write(
            reports.join(format!("{}.json", r.paper_id)),
            json_report(&r.paper_id, &r.criteria),
        )
        .unwrap();
        let creator = |i: usize| r.creator_raw.get(i).cloned().unwrap_or_default();
        let year = r.year.map(|y| y.to_string()).unwrap_or_default();
        w.write_record([
            r.paper_id.clone(),
            year,
            r.field_of_study.clone(),
            creator(0),
            creator(1),
            creator(2),
        ])
        .unwrap();
    }
    w.flush().unwrap();
    metadata
}
