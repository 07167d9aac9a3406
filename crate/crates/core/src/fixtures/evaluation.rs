//! Evaluation records rebuilt from published counts.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evaluation::{BibliographyGrade, CitationGrade, EvaluationRecord, MetadataGrade, Readability};

/// Per-field readability counts (good, okay, bad); 385 papers in total.
pub const READABILITY_BY_FIELD: &[(&str, usize, usize, usize)] = &[
    ("Art", 6, 1, 6),
    ("Biology", 12, 7, 4),
    ("Business", 6, 2, 6),
    ("Chemistry", 12, 5, 2),
    ("Computer science", 10, 7, 4),
    ("Economics", 6, 8, 6),
    ("Engineering", 15, 7, 1),
    ("Environmental science", 7, 8, 3),
    ("Geography", 9, 6, 2),
    ("Geology", 12, 8, 1),
    ("History", 5, 1, 1),
    ("Materials science", 15, 8, 1),
    ("Mathematics", 13, 8, 4),
    ("Medicine", 14, 12, 0),
    ("Other", 6, 2, 0),
    ("Philosophy", 7, 5, 0),
    ("Physics", 25, 10, 4),
    ("Political science", 6, 6, 1),
    ("Psychology", 11, 7, 4),
    ("Sociology", 13, 4, 3),
];

pub const ANNOTATED_PAPERS: usize = 385;
pub const SKIPPED_PAPERS: usize = 137;
/// Papers graded by both annotators.
pub const OVERLAP_PAPERS: usize = 20;

pub const FIRST_ANNOTATOR: &str = "annotator-1";
pub const SECOND_ANNOTATOR: &str = "annotator-2";

const SKIP_REASONS: [&str; 3] = ["not in English", "too long", "not a paper"];

/// `counts[i]` copies of bucket `i`, shuffled.
fn column<R: Rng>(rng: &mut R, counts: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(b, &n)| std::iter::repeat_n(b, n))
        .collect();
    out.shuffle(rng);
    out
}

/// An error count for an object bucket: 0, 1 or more than one.
fn object_errors<R: Rng>(rng: &mut R, bucket: usize) -> u32 {
    match bucket {
        0 => 0,
        1 => 1,
        _ => rng.random_range(2..=4),
    }
}

/// A text error count for a bucket; bucket 0 is unanswered.
fn text_errors<R: Rng>(rng: &mut R, bucket: usize) -> Option<u32> {
    match bucket {
        0 => None,
        1 => Some(0),
        2 => Some(rng.random_range(1..=5)),
        _ => Some(rng.random_range(6..=15)),
    }
}

fn bibliography<R: Rng>(rng: &mut R, bucket: usize) -> Option<BibliographyGrade> {
    use BibliographyGrade::*;
    let coin = rng.random_bool(0.5);
    match bucket {
        0 => None,
        1 => Some(NoBibliography),
        2 => Some(if coin { AllCorrect } else { MostlyCorrect }),
        3 => Some(HalfCorrect),
        _ => Some(if coin { MostlyIncorrect } else { Incorrect }),
    }
}

fn citations<R: Rng>(rng: &mut R, bucket: usize) -> Option<CitationGrade> {
    use CitationGrade::*;
    let coin = rng.random_bool(0.5);
    match bucket {
        0 => None,
        1 => Some(NoBibliography),
        2 => Some(if coin { AllLinked } else { MajorityLinked }),
        3 => Some(HalfLinked),
        _ => Some(if coin { MostUnlinked } else { NoneLinked }),
    }
}

const METADATA: [MetadataGrade; 3] = [MetadataGrade::Yes, MetadataGrade::Partially, MetadataGrade::No];

/// Records whose per-element error distributions and per-field readability
/// equal the published counts, plus skipped papers and a second annotator's
/// records for an overlap sample. Returns the records and the paper to field
/// map.
pub fn evaluation_corpus() -> (Vec<EvaluationRecord>, BTreeMap<String, String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(2022);
    let n = ANNOTATED_PAPERS;

    let mut fields = Vec::with_capacity(n);
    for &(field, good, okay, bad) in READABILITY_BY_FIELD {
        fields.extend(std::iter::repeat_n((field, Readability::NoMajorProblems), good));
        fields.extend(std::iter::repeat_n((field, Readability::SomeProblems), okay));
        fields.extend(std::iter::repeat_n((field, Readability::LotsOfProblems), bad));
    }
    assert_eq!(fields.len(), n);

    let title = column(&mut rng, &[337, 16, 32]);
    let authors = column(&mut rng, &[307, 64, 14]);
    let abstract_ = column(&mut rng, &[308, 22, 55]);

    // Figures: 94 papers without figures, the rest split by the extraction
    // and caption distributions independently.
    let no_figures = column(&mut rng, &[n - 94, 94]);
    let mut fig_extract = column(&mut rng, &[6, 201, 45, 39]).into_iter();
    let mut fig_caption = column(&mut rng, &[174, 55, 62]).into_iter();
    let no_tables = column(&mut rng, &[n - 168, 166, 2]);
    let mut tab_extract = column(&mut rng, &[165, 32, 20]).into_iter();
    let mut tab_caption = column(&mut rng, &[190, 23, 4]).into_iter();

    let header_footer = column(&mut rng, &[3, 170, 172, 40]);
    let headings = column(&mut rng, &[2, 88, 258, 37]);
    let paragraphs = column(&mut rng, &[1, 226, 128, 30]);
    let bib = column(&mut rng, &[7, 15, 313, 3, 47]);
    let cites = column(&mut rng, &[39, 10, 290, 20, 26]);

    let mut records = Vec::new();
    let mut field_map = BTreeMap::new();
    for (i, &(field, readability)) in fields.iter().enumerate() {
        let paper_id = format!("eval-{i:03}");
        field_map.insert(paper_id.clone(), field.to_string());
        let mut r = EvaluationRecord {
            schema_version: crate::evaluation::RECORD_SCHEMA_VERSION,
            paper_id,
            annotator_id: if i % 2 == 0 { FIRST_ANNOTATOR } else { SECOND_ANNOTATOR }.to_string(),
            title_ok: Some(METADATA[title[i]]),
            authors_ok: Some(METADATA[authors[i]]),
            abstract_ok: Some(METADATA[abstract_[i]]),
            has_equations: Some(rng.random_bool(0.3)),
            header_footer_errors: text_errors(&mut rng, header_footer[i]),
            section_heading_errors: text_errors(&mut rng, headings[i]),
            missing_paragraphs: text_errors(&mut rng, paragraphs[i]),
            bibliography_grade: bibliography(&mut rng, bib[i]),
            inline_citation_grade: citations(&mut rng, cites[i]),
            readability: Some(readability),
            ..Default::default()
        };

        if no_figures[i] == 1 {
            r.figures_present = Some(0);
            r.figures_correct = Some(0);
            r.figure_captions_correct = Some(0);
            r.figure_captions_in_body = Some(0);
        } else {
            let extract = fig_extract.next().expect("figure extraction column");
            let caption = fig_caption.next().expect("figure caption column");
            let ext_err = (extract > 0).then(|| object_errors(&mut rng, extract - 1));
            let cap_err = object_errors(&mut rng, caption);
            let present = ext_err.unwrap_or(0).max(cap_err).max(1) + rng.random_range(0..3);
            r.figures_present = Some(present);
            r.figures_correct = ext_err.map(|e| present - e);
            r.figure_captions_correct = Some(present - cap_err);
            r.figure_captions_in_body = Some(rng.random_range(0..=cap_err));
        }

        match no_tables[i] {
            2 => {}
            1 => {
                r.tables_present = Some(0);
                r.tables_correct = Some(0);
                r.table_captions_correct = Some(0);
                r.table_captions_in_body = Some(0);
                r.table_content_in_body = Some(0);
            }
            _ => {
                let ext_err = object_errors(&mut rng, tab_extract.next().expect("table column"));
                let cap_err = object_errors(&mut rng, tab_caption.next().expect("table column"));
                let present = ext_err.max(cap_err).max(1) + rng.random_range(0..3);
                r.tables_present = Some(present);
                r.tables_correct = Some(present - ext_err);
                r.table_content_in_body = Some(rng.random_range(0..=ext_err));
                r.table_captions_correct = Some(present - cap_err);
                r.table_captions_in_body = Some(rng.random_range(0..=cap_err));
            }
        }
        records.push(r);
    }

    // The second annotator also grades the first OVERLAP_PAPERS papers of
    // the first annotator, agreeing on everything but the readability grade
    // of every fourth one.
    let overlap: Vec<EvaluationRecord> = records
        .iter()
        .filter(|r| r.annotator_id == FIRST_ANNOTATOR)
        .take(OVERLAP_PAPERS)
        .enumerate()
        .map(|(j, r)| {
            let mut copy = r.clone();
            copy.annotator_id = SECOND_ANNOTATOR.to_string();
            if j % 4 == 0 {
                copy.readability = Some(match r.readability {
                    Some(Readability::NoMajorProblems) => Readability::SomeProblems,
                    _ => Readability::NoMajorProblems,
                });
            }
            copy
        })
        .collect();
    records.extend(overlap);

    records.extend((0..SKIPPED_PAPERS).map(|i| EvaluationRecord {
        schema_version: crate::evaluation::RECORD_SCHEMA_VERSION,
        paper_id: format!("eval-skip-{i:03}"),
        annotator_id: if i % 2 == 0 { FIRST_ANNOTATOR } else { SECOND_ANNOTATOR }.to_string(),
        skipped: Some(SKIP_REASONS[i % SKIP_REASONS.len()].to_string()),
        ..Default::default()
    }));
    (records, field_map)
}

/// Two raters' counts over 25 items whose absolute differences have mean
/// 1.88 and population standard deviation 2.1226 (10 exact matches, one
/// difference of 10, nine of 3 and five of 2).
pub fn header_footer_pair() -> (Vec<f64>, Vec<f64>) {
    let diffs: [i32; 25] = [
        0, 3, 0, 2, 3, 0, 10, 3, 0, 2, 3, 0, 3, 2, 0, 3, 3, 0, 2, 0, 3, 0, 2, 3, 0,
    ];
    let a: Vec<f64> = (0..25).map(|i| f64::from(i * 7 % 11 + 4)).collect();
    let b: Vec<f64> = a
        .iter()
        .zip(diffs)
        .map(|(&x, d)| {
            let d = f64::from(d);
            if x >= d && x as i32 % 2 == 0 {
                x - d
            } else {
                x + d
            }
        })
        .collect();
    (a, b)
}
