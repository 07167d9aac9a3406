use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::record::{BibliographyGrade, CitationGrade, EvaluationRecord, MetadataGrade, Readability};
use crate::error::EvaluationError;

/// How one record is chosen for a paper annotated more than once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum PrimaryAnnotator {
    /// The non-skipped record with the smallest annotator id.
    #[default]
    First,
    /// A seeded random choice among the non-skipped records.
    Random { seed: u64 },
}

/// Records reduced to one per paper.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimarySelection<'a> {
    /// One non-skipped record per paper, in paper id order.
    pub records: Vec<&'a EvaluationRecord>,
    /// Papers whose every record is skipped.
    pub skipped_papers: Vec<String>,
}

pub fn select_primary(records: &[EvaluationRecord], policy: PrimaryAnnotator) -> PrimarySelection<'_> {
    let mut by_paper: BTreeMap<&str, Vec<&EvaluationRecord>> = BTreeMap::new();
    for r in records {
        by_paper.entry(r.paper_id.as_str()).or_default().push(r);
    }
    let mut rng = match policy {
        PrimaryAnnotator::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        PrimaryAnnotator::First => None,
    };
    let mut out = PrimarySelection {
        records: Vec::new(),
        skipped_papers: Vec::new(),
    };
    for (paper, group) in by_paper {
        let mut usable: Vec<&EvaluationRecord> = group.into_iter().filter(|r| !r.is_skipped()).collect();
        usable.sort_by(|a, b| a.annotator_id.cmp(&b.annotator_id));
        let chosen = match rng.as_mut() {
            Some(rng) => usable.choose(rng).copied(),
            None => usable.first().copied(),
        };
        match chosen {
            Some(r) => out.records.push(r),
            None => out.skipped_papers.push(paper.to_string()),
        }
    }
    out
}

/// One row of the error-distribution table: bucket labels and counts share
/// the layout of the row's section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub element: String,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionSection {
    pub title: String,
    pub buckets: Vec<String>,
    pub rows: Vec<DistributionRow>,
}

/// Per-element bucketed counts over one record per paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub n_papers: usize,
    pub skipped_papers: usize,
    pub sections: Vec<DistributionSection>,
}

impl ErrorTable {
    pub fn row(&self, element: &str) -> Option<&DistributionRow> {
        self.sections
            .iter()
            .flat_map(|s| &s.rows)
            .find(|r| r.element == element)
    }

    /// Each section starts with its header row; rows are padded to the widest
    /// section with empty cells.
    pub fn to_csv(&self) -> String {
        let width = self.sections.iter().map(|s| s.buckets.len()).max().unwrap_or(0) + 1;
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut put = |cells: Vec<String>| {
            let mut cells = cells;
            cells.resize(width, String::new());
            w.write_record(&cells).expect("in-memory csv write");
        };
        for s in &self.sections {
            put(std::iter::once(s.title.clone())
                .chain(s.buckets.iter().cloned())
                .collect());
            for r in &s.rows {
                put(std::iter::once(r.element.clone())
                    .chain(r.counts.iter().map(usize::to_string))
                    .collect());
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }
}

const METADATA_BUCKETS: [&str; 3] = ["Yes", "Partially", "No"];
const OBJECT_BUCKETS: [&str; 5] = ["Skipped", "No figures/tables", "No errors", "1 error", ">1 error"];
const TEXT_BUCKETS: [&str; 4] = ["Skipped", "No errors", "1-5 errors", ">5 errors"];
const BIB_BUCKETS: [&str; 5] = [
    "Skipped/poor bib extraction",
    "No bibliography",
    "All or most correct",
    "Half correct",
    "Mostly incorrect",
];
const READABILITY_BUCKETS: [&str; 3] = ["Good", "Okay", "Bad"];

fn metadata_bucket(g: Option<MetadataGrade>) -> Option<usize> {
    g.map(|g| g as usize)
}

/// Skipped, none present, no errors, one error, more than one.
pub fn object_bucket(present: Option<u32>, errors: Option<u32>) -> usize {
    match (present, errors) {
        (None, _) => 0,
        (Some(0), _) => 1,
        (Some(_), None) => 0,
        (Some(_), Some(0)) => 2,
        (Some(_), Some(1)) => 3,
        (Some(_), Some(_)) => 4,
    }
}

/// Skipped, no errors, 1 to 5, more than 5.
pub fn text_bucket(errors: Option<u32>) -> usize {
    match errors {
        None => 0,
        Some(0) => 1,
        Some(1..=5) => 2,
        Some(_) => 3,
    }
}

pub fn bibliography_bucket(g: Option<BibliographyGrade>) -> usize {
    use BibliographyGrade::*;
    match g {
        None => 0,
        Some(NoBibliography) => 1,
        Some(AllCorrect | MostlyCorrect) => 2,
        Some(HalfCorrect) => 3,
        Some(MostlyIncorrect | Incorrect) => 4,
    }
}

pub fn citation_bucket(g: Option<CitationGrade>) -> usize {
    use CitationGrade::*;
    match g {
        None => 0,
        Some(NoBibliography) => 1,
        Some(AllLinked | MajorityLinked) => 2,
        Some(HalfLinked) => 3,
        Some(MostUnlinked | NoneLinked) => 4,
    }
}

fn readability_bucket(r: Option<Readability>) -> Option<usize> {
    r.map(|r| r as usize)
}

fn count_rows<F>(records: &[&EvaluationRecord], width: usize, element: &str, bucket: F) -> DistributionRow
where
    F: Fn(&EvaluationRecord) -> Option<usize>,
{
    let mut counts = vec![0; width];
    for r in records {
        if let Some(b) = bucket(r) {
            counts[b] += 1;
        }
    }
    DistributionRow {
        element: element.to_string(),
        counts,
    }
}

fn section(title: &str, buckets: &[&str], rows: Vec<DistributionRow>) -> DistributionSection {
    DistributionSection {
        title: title.to_string(),
        buckets: buckets.iter().map(|b| b.to_string()).collect(),
        rows,
    }
}

/// Bucketed error counts per evaluated element, one record per paper.
pub fn aggregate_errors(records: &[EvaluationRecord], policy: PrimaryAnnotator) -> Result<ErrorTable, EvaluationError> {
    let selection = select_primary(records, policy);
    let rs = &selection.records;
    if rs.is_empty() {
        return Err(EvaluationError::EmptyInput);
    }
    let obj = OBJECT_BUCKETS.len();
    let text = TEXT_BUCKETS.len();
    let bib = BIB_BUCKETS.len();
    let sections = vec![
        section(
            "Metadata Element",
            &METADATA_BUCKETS,
            vec![
                count_rows(rs, 3, "Title", |r| metadata_bucket(r.title_ok)),
                count_rows(rs, 3, "Authors", |r| metadata_bucket(r.authors_ok)),
                count_rows(rs, 3, "Abstract", |r| metadata_bucket(r.abstract_ok)),
            ],
        ),
        section(
            "Figure/Table Element",
            &OBJECT_BUCKETS,
            vec![
                count_rows(rs, obj, "Figure extraction errors", |r| {
                    Some(object_bucket(r.figures_present, r.figure_errors()))
                }),
                count_rows(rs, obj, "Figure caption errors", |r| {
                    Some(object_bucket(r.figures_present, r.figure_caption_errors()))
                }),
                count_rows(rs, obj, "Table extraction errors", |r| {
                    Some(object_bucket(r.tables_present, r.table_errors()))
                }),
                count_rows(rs, obj, "Table caption errors", |r| {
                    Some(object_bucket(r.tables_present, r.table_caption_errors()))
                }),
            ],
        ),
        section(
            "Text Element",
            &TEXT_BUCKETS,
            vec![
                count_rows(rs, text, "Header/Footer/Footnote errors", |r| {
                    Some(text_bucket(r.header_footer_errors))
                }),
                count_rows(rs, text, "Section heading errors", |r| {
                    Some(text_bucket(r.section_heading_errors))
                }),
                count_rows(rs, text, "Body paragraph errors", |r| {
                    Some(text_bucket(r.missing_paragraphs))
                }),
            ],
        ),
        section(
            "Bibliography Element",
            &BIB_BUCKETS,
            vec![
                count_rows(rs, bib, "Bibliography extraction", |r| {
                    Some(bibliography_bucket(r.bibliography_grade))
                }),
                count_rows(rs, bib, "Inline citation linking", |r| {
                    Some(citation_bucket(r.inline_citation_grade))
                }),
            ],
        ),
        section(
            "Overall Readability",
            &READABILITY_BUCKETS,
            vec![count_rows(rs, 3, "Overall score", |r| {
                readability_bucket(r.readability)
            })],
        ),
    ];
    Ok(ErrorTable {
        n_papers: rs.len(),
        skipped_papers: selection.skipped_papers.len(),
        sections,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadabilityRow {
    pub group: String,
    pub n: usize,
    pub good: usize,
    pub okay: usize,
    pub bad: usize,
}

/// Readability counts for all papers followed by one row per field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadabilityTable {
    pub all: ReadabilityRow,
    pub fields: Vec<ReadabilityRow>,
}

impl ReadabilityTable {
    pub fn field(&self, name: &str) -> Option<&ReadabilityRow> {
        self.fields.iter().find(|r| r.group == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["Overall Readability", "Number of papers", "Good", "Okay", "Bad"])
            .expect("in-memory csv write");
        for r in std::iter::once(&self.all).chain(&self.fields) {
            w.write_record([
                r.group.clone(),
                r.n.to_string(),
                r.good.to_string(),
                r.okay.to_string(),
                r.bad.to_string(),
            ])
            .expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }
}

/// Readability distribution split by field of study. Papers missing from
/// `field_map` are grouped under "Unknown", which sorts last.
pub fn readability_by_field(
    records: &[EvaluationRecord],
    field_map: &BTreeMap<String, String>,
    policy: PrimaryAnnotator,
) -> Result<ReadabilityTable, EvaluationError> {
    let selection = select_primary(records, policy);
    if selection.records.is_empty() {
        return Err(EvaluationError::EmptyInput);
    }
    let empty = |group: &str| ReadabilityRow {
        group: group.to_string(),
        n: 0,
        good: 0,
        okay: 0,
        bad: 0,
    };
    let mut all = empty("All papers");
    let mut fields: BTreeMap<(bool, String), ReadabilityRow> = BTreeMap::new();
    for r in &selection.records {
        let Some(grade) = r.readability else { continue };
        let field = field_map.get(&r.paper_id).map(String::as_str).unwrap_or("Unknown");
        let row = fields
            .entry((field == "Unknown", field.to_string()))
            .or_insert_with(|| empty(field));
        for row in [&mut all, row] {
            row.n += 1;
            match grade {
                Readability::NoMajorProblems => row.good += 1,
                Readability::SomeProblems => row.okay += 1,
                Readability::LotsOfProblems => row.bad += 1,
            }
        }
    }
    Ok(ReadabilityTable {
        all,
        fields: fields.into_values().collect(),
    })
}
