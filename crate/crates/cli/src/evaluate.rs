//! Evaluation records: aggregate tables and inter-rater agreement.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

use scia11y_core::error::EvaluationError;
use scia11y_core::evaluation::{read_records_csv, read_records_dir, EvaluationRecord};

/// Invalid records, each with its problems.
#[derive(Debug)]
pub struct InvalidRecords(pub Vec<EvaluationError>);

impl std::fmt::Display for InvalidRecords {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Loads a record directory or a CSV export. Every invalid record is
/// reported, not only the first.
pub fn load(path: &Path) -> Result<Result<Vec<EvaluationRecord>, InvalidRecords>> {
    if path.is_file() {
        let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        return Ok(read_records_csv(file).map_err(|e| InvalidRecords(vec![e])));
    }
    let mut records = Vec::new();
    let mut invalid = Vec::new();
    for (_, r) in read_records_dir(path)? {
        match r {
            Ok(r) => records.push(r),
            Err(e) => invalid.push(e),
        }
    }
    Ok(if invalid.is_empty() {
        Ok(records)
    } else {
        Err(InvalidRecords(invalid))
    })
}

#[derive(Deserialize)]
struct FieldRow {
    paper_id: String,
    field_of_study: String,
}

/// Paper to field-of-study map from a CSV with `paper_id` and
/// `field_of_study` columns; other columns are ignored.
pub fn read_field_map(path: Option<&Path>) -> Result<BTreeMap<String, String>> {
    let Some(path) = path else { return Ok(BTreeMap::new()) };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut map = BTreeMap::new();
    for row in reader.deserialize::<FieldRow>() {
        let row = row.with_context(|| format!("parsing {}", path.display()))?;
        map.insert(row.paper_id, row.field_of_study);
    }
    Ok(map)
}
