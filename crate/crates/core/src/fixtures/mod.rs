//! Synthetic inputs for tests: random documents for property suites and
//! corpora rebuilt from published aggregate counts.

pub mod compliance;
pub mod evaluation;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    AuthorName, BibEntry, CitationSpan, EquationSlot, ExtractedDocument, ExtractedObject, FigureManifest, Handle,
    ObjectKind, ObjectRef, Paragraph, Section, MANIFEST_SCHEMA_VERSION,
};

/// Appends `piece` to `text`, returning its character span.
fn push_span(text: &mut String, piece: &str) -> (usize, usize) {
    let start = text.chars().count();
    text.push_str(piece);
    (start, start + piece.chars().count())
}

pub struct ParagraphSpec<'a> {
    pub words: &'a str,
    pub mentions: Vec<Handle>,
    pub citations: Vec<&'a str>,
}

/// Builds a paragraph whose text is `words` followed by one sentence per
/// mention and citation, with spans filled in.
pub fn paragraph(spec: ParagraphSpec<'_>, bib_keys: &[String]) -> Paragraph {
    let mut text = spec.words.to_string();
    let mut object_refs = Vec::new();
    for h in spec.mentions {
        text.push_str(" See ");
        let short = match h.kind {
            ObjectKind::Figure => format!("Fig. {}", h.number),
            ObjectKind::Table => format!("Table {}", h.number),
        };
        let (start, end) = push_span(&mut text, &short);
        text.push('.');
        object_refs.push(ObjectRef {
            start,
            end,
            ref_id: None,
            handle: Some(h),
        });
    }
    let mut citation_spans = Vec::new();
    for key in spec.citations {
        text.push_str(" As shown ");
        let (start, end) = push_span(&mut text, &format!("[{key}]"));
        text.push('.');
        citation_spans.push(CitationSpan {
            start,
            end,
            ref_id: Some(key.to_string()),
            resolved: bib_keys.iter().any(|k| k == key),
        });
    }
    Paragraph {
        text,
        citation_spans,
        object_refs,
    }
}

pub fn bib(key: &str, n: usize) -> BibEntry {
    BibEntry {
        key: key.to_string(),
        raw_text: format!("Author {n}. Paper title {n}. Venue. 20{:02}.", n % 100),
        url: None,
        structured: None,
    }
}

pub fn section(index: usize, heading: &str, numbering: Option<&str>, paragraphs: Vec<Paragraph>) -> Section {
    Section {
        index,
        heading_text: heading.to_string(),
        numbering: numbering.map(str::to_string),
        paragraphs,
    }
}

pub fn object(kind: ObjectKind, number: u32) -> ExtractedObject {
    ExtractedObject {
        kind,
        number: Some(number),
        caption: format!("{} {number}: caption text.", kind.label()),
        image_path: Some(format!("{}{number}.png", kind.slug())),
        extracted: true,
    }
}

pub fn manifest(paper_id: &str, objects: Vec<ExtractedObject>) -> FigureManifest {
    FigureManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        paper_id: paper_id.to_string(),
        objects,
    }
}

pub fn document(paper_id: &str, sections: Vec<Section>, bibliography: Vec<BibEntry>) -> ExtractedDocument {
    ExtractedDocument {
        paper_id: paper_id.to_string(),
        title: format!("Paper {paper_id}"),
        authors: vec![AuthorName {
            first: "Ada".into(),
            middle: vec![],
            last: "Lovelace".into(),
            suffix: String::new(),
        }],
        abstract_paragraphs: vec![Paragraph {
            text: "We study things.".into(),
            ..Paragraph::default()
        }],
        sections,
        bibliography,
        equation_slots: Vec::new(),
        source_hash: String::new(),
    }
}

/// Paragraph 1 mentions Figure 1, paragraph 2 mentions Figure 3; the
/// manifest holds Figures 1 to 3.
pub fn placement_example() -> (ExtractedDocument, FigureManifest) {
    let fig = |n| Handle::new(ObjectKind::Figure, n);
    let p1 = paragraph(
        ParagraphSpec {
            words: "In the first paragraph we introduce the method.",
            mentions: vec![fig(1)],
            citations: vec![],
        },
        &[],
    );
    let p2 = paragraph(
        ParagraphSpec {
            words: "The second paragraph reports results.",
            mentions: vec![fig(3)],
            citations: vec![],
        },
        &[],
    );
    let doc = document(
        "example",
        vec![section(0, "Introduction", Some("1"), vec![p1, p2])],
        vec![],
    );
    let figs = manifest(
        "example",
        vec![
            object(ObjectKind::Figure, 1),
            object(ObjectKind::Figure, 2),
            object(ObjectKind::Figure, 3),
        ],
    );
    (doc, figs)
}

/// Bibliography entry "1" cited in "II. Related Works" (twice) and in
/// "III. Methods".
pub fn return_link_example() -> ExtractedDocument {
    let keys = vec!["1".to_string(), "2".to_string()];
    let p = |words, citations| {
        paragraph(
            ParagraphSpec {
                words,
                mentions: vec![],
                citations,
            },
            &keys,
        )
    };
    let sections = vec![
        section(0, "Introduction", Some("1"), vec![p("We motivate the work.", vec![])]),
        section(
            1,
            "Related Works",
            Some("2"),
            vec![
                p("Prior systems exist.", vec!["2", "1"]),
                p("More prior work.", vec!["1"]),
            ],
        ),
        section(
            2,
            "Methods",
            Some("3"),
            vec![p("We follow the method.", vec!["1", "1"])],
        ),
    ];
    document("bibexample", sections, vec![bib("1", 1), bib("2", 2)])
}

/// Random document with at most `max_objects` manifest objects and
/// `max_paragraphs` body paragraphs.
pub fn random_document<R: Rng>(
    rng: &mut R,
    max_objects: u32,
    max_paragraphs: usize,
) -> (ExtractedDocument, FigureManifest) {
    let bib_keys: Vec<String> = (0..rng.random_range(0..6)).map(|i| format!("BIBREF{i}")).collect();
    let n_paragraphs = rng.random_range(1..=max_paragraphs);
    let n_sections = rng.random_range(1..=n_paragraphs.min(5));
    let mut cuts: Vec<usize> = (1..n_paragraphs).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(n_sections - 1).collect();
    cuts.sort_unstable();

    let kinds = [ObjectKind::Figure, ObjectKind::Table];
    let mut paragraphs = Vec::with_capacity(n_paragraphs);
    for _ in 0..n_paragraphs {
        let mentions = (0..rng.random_range(0..3))
            .map(|_| Handle::new(kinds[rng.random_range(0..2)], rng.random_range(1..=max_objects + 1)))
            .collect();
        let mut citations: Vec<&str> = Vec::new();
        for _ in 0..rng.random_range(0..4) {
            if !bib_keys.is_empty() && rng.random_bool(0.85) {
                citations.push(bib_keys[rng.random_range(0..bib_keys.len())].as_str());
            } else {
                citations.push("MISSING");
            }
        }
        paragraphs.push(paragraph(
            ParagraphSpec {
                words: "Body text.",
                mentions,
                citations,
            },
            &bib_keys,
        ));
    }

    let mut sections = Vec::new();
    let mut start = 0;
    for (i, end) in cuts.into_iter().chain(std::iter::once(n_paragraphs)).enumerate() {
        let numbering = match rng.random_range(0..4) {
            0 => None,
            1 => Some(format!("{}.{}", i + 1, rng.random_range(1..3))),
            2 => Some(format!("{}.1.{}", i + 1, rng.random_range(1..3))),
            _ => Some(format!("{}", i + 1)),
        };
        sections.push(Section {
            index: i,
            heading_text: format!("Heading {i}"),
            numbering,
            paragraphs: paragraphs[start..end].to_vec(),
        });
        start = end;
    }

    let mut equation_slots = Vec::new();
    for s in &sections {
        if rng.random_bool(0.2) {
            let after = rng.random_range(0..=s.paragraphs.len());
            equation_slots.push(EquationSlot {
                section_index: s.index,
                after_paragraph: after.checked_sub(1),
                label: None,
            });
        }
    }

    let mut objects = Vec::new();
    let n_objects = rng.random_range(0..=max_objects);
    for kind in kinds {
        let mut numbers: Vec<u32> = (1..=max_objects).collect();
        numbers.shuffle(rng);
        for n in numbers.into_iter().take(n_objects as usize / 2) {
            let mut o = object(kind, n);
            if rng.random_bool(0.15) {
                o.extracted = false;
                o.image_path = None;
            }
            objects.push(o);
        }
    }
    if rng.random_bool(0.2) && (objects.len() as u32) < max_objects {
        objects.push(ExtractedObject {
            kind: kinds[rng.random_range(0..2)],
            number: None,
            caption: "Unnumbered object.".into(),
            image_path: Some("extra.png".into()),
            extracted: true,
        });
    }
    objects.shuffle(rng);

    let bibliography = bib_keys.iter().enumerate().map(|(i, k)| bib(k, i)).collect();
    let mut doc = document("random", sections, bibliography);
    doc.equation_slots = equation_slots;
    if rng.random_bool(0.2) {
        doc.abstract_paragraphs[0] = paragraph(
            ParagraphSpec {
                words: "Abstract text.",
                mentions: vec![Handle::new(ObjectKind::Figure, 1)],
                citations: bib_keys.first().map(|k| vec![k.as_str()]).unwrap_or_default(),
            },
            &bib_keys,
        );
    }
    (doc, manifest("random", objects))
}
