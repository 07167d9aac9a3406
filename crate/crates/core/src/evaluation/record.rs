use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::EvaluationError;

pub const RECORD_SCHEMA_VERSION: u32 = 1;

const UNPARSED: &str = "<unparsed>";

/// Answer to the title, authors and abstract questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetadataGrade {
    Yes,
    Partially,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BibliographyGrade {
    AllCorrect,
    MostlyCorrect,
    HalfCorrect,
    MostlyIncorrect,
    Incorrect,
    NoBibliography,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CitationGrade {
    AllLinked,
    MajorityLinked,
    HalfLinked,
    MostUnlinked,
    NoneLinked,
    NoBibliography,
}

/// Overall readability rubric outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readability {
    NoMajorProblems,
    SomeProblems,
    LotsOfProblems,
}

/// One annotator's answers for one paper. Every question field is optional:
/// `None` means the annotator left that question unanswered. A record with
/// `skipped` set stands for a paper judged unsuitable and carries no answers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationRecord {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub paper_id: String,
    pub annotator_id: String,
    #[serde(default)]
    pub skipped: Option<String>,
    #[serde(default)]
    pub title_ok: Option<MetadataGrade>,
    #[serde(default)]
    pub authors_ok: Option<MetadataGrade>,
    #[serde(default)]
    pub abstract_ok: Option<MetadataGrade>,
    #[serde(default)]
    pub has_equations: Option<bool>,
    #[serde(default)]
    pub figures_present: Option<u32>,
    #[serde(default)]
    pub figures_correct: Option<u32>,
    #[serde(default)]
    pub figure_captions_correct: Option<u32>,
    #[serde(default)]
    pub figure_captions_in_body: Option<u32>,
    #[serde(default)]
    pub tables_present: Option<u32>,
    #[serde(default)]
    pub tables_correct: Option<u32>,
    #[serde(default)]
    pub table_captions_correct: Option<u32>,
    #[serde(default)]
    pub table_captions_in_body: Option<u32>,
    #[serde(default)]
    pub table_content_in_body: Option<u32>,
    #[serde(default)]
    pub header_footer_errors: Option<u32>,
    #[serde(default)]
    pub section_heading_errors: Option<u32>,
    #[serde(default)]
    pub missing_paragraphs: Option<u32>,
    #[serde(default)]
    pub bibliography_grade: Option<BibliographyGrade>,
    #[serde(default)]
    pub inline_citation_grade: Option<CitationGrade>,
    #[serde(default)]
    pub readability: Option<Readability>,
    #[serde(default)]
    pub comments: Option<String>,
}

fn schema_version() -> u32 {
    RECORD_SCHEMA_VERSION
}

impl EvaluationRecord {
    pub fn is_skipped(&self) -> bool {
        self.skipped.is_some()
    }

    /// `paper_id/annotator_id`, used in messages.
    pub fn id(&self) -> String {
        format!("{}/{}", self.paper_id, self.annotator_id)
    }

    /// Figures present minus figures correctly extracted.
    pub fn figure_errors(&self) -> Option<u32> {
        Some(self.figures_present?.saturating_sub(self.figures_correct?))
    }

    /// The larger of missed captions and captions mixed into the body text.
    pub fn figure_caption_errors(&self) -> Option<u32> {
        let missed = self.figures_present?.saturating_sub(self.figure_captions_correct?);
        Some(missed.max(self.figure_captions_in_body.unwrap_or(0)))
    }

    /// The larger of badly extracted tables and tables whose content leaked
    /// into the body text.
    pub fn table_errors(&self) -> Option<u32> {
        let missed = self.tables_present?.saturating_sub(self.tables_correct?);
        Some(missed.max(self.table_content_in_body.unwrap_or(0)))
    }

    pub fn table_caption_errors(&self) -> Option<u32> {
        let missed = self.tables_present?.saturating_sub(self.table_captions_correct?);
        Some(missed.max(self.table_captions_in_body.unwrap_or(0)))
    }

    /// Field-level problems; empty when the record is valid.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.schema_version != RECORD_SCHEMA_VERSION {
            out.push(format!(
                "schema_version: expected {RECORD_SCHEMA_VERSION}, found {}",
                self.schema_version
            ));
        }
        if self.paper_id.trim().is_empty() {
            out.push("paper_id: must not be empty".to_string());
        }
        if self.annotator_id.trim().is_empty() {
            out.push("annotator_id: must not be empty".to_string());
        }
        if self.is_skipped() {
            if self.has_answers() {
                out.push("skipped: a skipped record must not carry answers".to_string());
            }
            return out;
        }
        for (name, value) in [
            ("title_ok", self.title_ok.is_some()),
            ("authors_ok", self.authors_ok.is_some()),
            ("abstract_ok", self.abstract_ok.is_some()),
            ("readability", self.readability.is_some()),
        ] {
            if !value {
                out.push(format!("{name}: required unless the record is skipped"));
            }
        }
        let bounded = [
            (
                "figures_correct",
                self.figures_correct,
                "figures_present",
                self.figures_present,
            ),
            (
                "figure_captions_correct",
                self.figure_captions_correct,
                "figures_present",
                self.figures_present,
            ),
            (
                "figure_captions_in_body",
                self.figure_captions_in_body,
                "figures_present",
                self.figures_present,
            ),
            (
                "tables_correct",
                self.tables_correct,
                "tables_present",
                self.tables_present,
            ),
            (
                "table_captions_correct",
                self.table_captions_correct,
                "tables_present",
                self.tables_present,
            ),
            (
                "table_captions_in_body",
                self.table_captions_in_body,
                "tables_present",
                self.tables_present,
            ),
            (
                "table_content_in_body",
                self.table_content_in_body,
                "tables_present",
                self.tables_present,
            ),
        ];
        for (name, value, bound_name, bound) in bounded {
            match (value, bound) {
                (Some(v), Some(b)) if v > b => {
                    out.push(format!("{name}: {v} exceeds {bound_name} ({b})"));
                }
                (Some(_), None) => out.push(format!("{name}: given without {bound_name}")),
                _ => {}
            }
        }
        out
    }

    fn has_answers(&self) -> bool {
        self.title_ok.is_some()
            || self.authors_ok.is_some()
            || self.abstract_ok.is_some()
            || self.has_equations.is_some()
            || self.figures_present.is_some()
            || self.figures_correct.is_some()
            || self.figure_captions_correct.is_some()
            || self.figure_captions_in_body.is_some()
            || self.tables_present.is_some()
            || self.tables_correct.is_some()
            || self.table_captions_correct.is_some()
            || self.table_captions_in_body.is_some()
            || self.table_content_in_body.is_some()
            || self.header_footer_errors.is_some()
            || self.section_heading_errors.is_some()
            || self.missing_paragraphs.is_some()
            || self.bibliography_grade.is_some()
            || self.inline_citation_grade.is_some()
            || self.readability.is_some()
    }

    pub fn validate(self) -> Result<Self, EvaluationError> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(self)
        } else {
            Err(EvaluationError::InvalidRecord {
                record: self.id(),
                problems,
            })
        }
    }
}

/// Parses and validates one record from JSON.
pub fn validate_record(raw: &str) -> Result<EvaluationRecord, EvaluationError> {
    let record: EvaluationRecord = serde_json::from_str(raw).map_err(|e| EvaluationError::InvalidRecord {
        record: UNPARSED.to_string(),
        problems: vec![e.to_string()],
    })?;
    record.validate()
}

/// One record file and its parse or validation outcome.
pub type RecordFile = (PathBuf, Result<EvaluationRecord, EvaluationError>);

/// Reads every `*.json` file below `dir`, in path order, validating each one
/// separately. The expected layout is `<dir>/<paper_id>/<annotator_id>.json`
/// but any nesting is accepted.
pub fn read_records_dir(dir: &Path) -> Result<Vec<RecordFile>, EvaluationError> {
    let mut files = Vec::new();
    collect_json(dir, &mut files)?;
    files.sort();
    Ok(files
        .into_iter()
        .map(|path| {
            let parsed = std::fs::read_to_string(&path)
                .map_err(|e| io_error(&path, e))
                .and_then(|raw| validate_record(&raw))
                .map_err(|e| match e {
                    EvaluationError::InvalidRecord { record, problems } if record == UNPARSED => {
                        EvaluationError::InvalidRecord {
                            record: path.display().to_string(),
                            problems,
                        }
                    }
                    other => other,
                });
            (path, parsed)
        })
        .collect())
}

/// Like [`read_records_dir`] but fails on the first invalid record.
pub fn load_records_dir(dir: &Path) -> Result<Vec<EvaluationRecord>, EvaluationError> {
    read_records_dir(dir)?.into_iter().map(|(_, r)| r).collect()
}

fn collect_json(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), EvaluationError> {
    let entries = std::fs::read_dir(dir).map_err(|e| io_error(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| io_error(dir, e))?.path();
        if path.is_dir() {
            collect_json(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "json") {
            out.push(path);
        }
    }
    Ok(())
}

fn io_error(path: &Path, e: std::io::Error) -> EvaluationError {
    EvaluationError::InvalidRecord {
        record: path.display().to_string(),
        problems: vec![e.to_string()],
    }
}

/// Writes each record to `<dir>/<paper_id>/<annotator_id>.json`.
pub fn write_records_dir(dir: &Path, records: &[EvaluationRecord]) -> std::io::Result<()> {
    for r in records {
        let paper_dir = dir.join(&r.paper_id);
        std::fs::create_dir_all(&paper_dir)?;
        let json = serde_json::to_string_pretty(r).map_err(std::io::Error::other)?;
        std::fs::write(paper_dir.join(format!("{}.json", r.annotator_id)), json + "\n")?;
    }
    Ok(())
}

/// One row per record, one column per field; empty cells are unanswered.
pub fn write_records_csv<W: Write>(writer: W, records: &[EvaluationRecord]) -> Result<(), EvaluationError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads records written by [`write_records_csv`] and validates each one.
pub fn read_records_csv<R: Read>(reader: R) -> Result<Vec<EvaluationRecord>, EvaluationError> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize::<EvaluationRecord>().map(|row| row?.validate()).collect()
}
