//! In-memory document model for the two extraction inputs: the structured
//! full text of a paper and the manifest of extracted figures and tables.

mod figures;
mod handle;
mod s2orc;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

pub use figures::{parse_figures, ExtractedObject, FigureManifest, MANIFEST_SCHEMA_VERSION};
pub use handle::{normalize_handle, scan_handles, Handle, ObjectKind};
pub use s2orc::{parse_extraction, to_s2orc_json};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedDocument {
    pub paper_id: String,
    pub title: String,
    pub authors: Vec<AuthorName>,
    #[serde(rename = "abstract")]
    pub abstract_paragraphs: Vec<Paragraph>,
    pub sections: Vec<Section>,
    pub bibliography: Vec<BibEntry>,
    pub equation_slots: Vec<EquationSlot>,
    /// sha256 of the input bytes, hex encoded.
    pub source_hash: String,
}

impl ExtractedDocument {
    pub fn bib_entry(&self, key: &str) -> Option<&BibEntry> {
        self.bibliography.iter().find(|b| b.key == key)
    }

    /// All paragraphs in reading order: abstract first, then the body.
    pub fn paragraphs(&self) -> impl Iterator<Item = (SectionRef, usize, &Paragraph)> {
        let abs = self
            .abstract_paragraphs
            .iter()
            .enumerate()
            .map(|(i, p)| (SectionRef::Abstract, i, p));
        let body = self.sections.iter().flat_map(|s| {
            s.paragraphs
                .iter()
                .enumerate()
                .map(move |(i, p)| (SectionRef::Body(s.index), i, p))
        });
        abs.chain(body)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorName {
    pub first: String,
    #[serde(default)]
    pub middle: Vec<String>,
    pub last: String,
    #[serde(default)]
    pub suffix: String,
}

impl AuthorName {
    pub fn full_name(&self) -> String {
        let mut parts: Vec<&str> = Vec::new();
        if !self.first.is_empty() {
            parts.push(&self.first);
        }
        parts.extend(self.middle.iter().map(String::as_str).filter(|m| !m.is_empty()));
        if !self.last.is_empty() {
            parts.push(&self.last);
        }
        if !self.suffix.is_empty() {
            parts.push(&self.suffix);
        }
        parts.join(" ")
    }
}

/// Which part of the document a paragraph belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionRef {
    Abstract,
    Body(usize),
}

impl SectionRef {
    /// Short form used inside anchor ids: `abs` or the section index.
    pub fn slug(self) -> String {
        match self {
            SectionRef::Abstract => "abs".to_string(),
            SectionRef::Body(i) => i.to_string(),
        }
    }
}

impl PartialOrd for SectionRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SectionRef {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (SectionRef::Abstract, SectionRef::Abstract) => Ordering::Equal,
            (SectionRef::Abstract, SectionRef::Body(_)) => Ordering::Less,
            (SectionRef::Body(_), SectionRef::Abstract) => Ordering::Greater,
            (SectionRef::Body(a), SectionRef::Body(b)) => a.cmp(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub index: usize,
    pub heading_text: String,
    /// Dotted number such as "2.1"; absent for unnumbered headings.
    pub numbering: Option<String>,
    pub paragraphs: Vec<Paragraph>,
}

impl Section {
    /// Nesting depth implied by the numbering ("2.1" is depth 2).
    pub fn numbering_depth(&self) -> usize {
        self.numbering.as_deref().map(|n| n.split('.').count()).unwrap_or(1)
    }
}

/// Offsets in every span are character (not byte) offsets into `text`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub text: String,
    pub citation_spans: Vec<CitationSpan>,
    pub object_refs: Vec<ObjectRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationSpan {
    pub start: usize,
    pub end: usize,
    /// Identifier given by the extractor, e.g. "BIBREF3".
    pub ref_id: Option<String>,
    /// True iff `ref_id` names an entry of the bibliography.
    pub resolved: bool,
}

impl CitationSpan {
    pub fn bib_key(&self) -> Option<&str> {
        if self.resolved {
            self.ref_id.as_deref()
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectRef {
    pub start: usize,
    pub end: usize,
    pub ref_id: Option<String>,
    /// `None` marks an unparseable mention.
    pub handle: Option<Handle>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibEntry {
    pub key: String,
    pub raw_text: String,
    pub url: Option<String>,
    pub structured: Option<BibStructured>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibStructured {
    pub authors: Vec<String>,
    pub title: String,
    pub venue: String,
    pub year: Option<i32>,
    pub doi: Option<String>,
}

/// A display equation that was detected but not extracted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationSlot {
    pub section_index: usize,
    /// Paragraph (within the section) the equation follows; `None` when it
    /// precedes the section's first paragraph.
    pub after_paragraph: Option<usize>,
    pub label: Option<String>,
}

/// Character-offset slice of a string.
pub fn char_slice(text: &str, start: usize, end: usize) -> &str {
    let mut idx = text.char_indices().map(|(b, _)| b).chain(std::iter::once(text.len()));
    let b_start = idx.by_ref().nth(start).unwrap_or(text.len());
    let b_end = if end > start {
        idx.nth(end - start - 1).unwrap_or(text.len())
    } else {
        b_start
    };
    &text[b_start..b_end]
}

/// "2.1." and " 3 " normalize to "2.1" and "3"; anything that is not a
/// dotted digit sequence (roman numerals, letters) yields `None`.
pub fn normalize_numbering(raw: &str) -> Option<String> {
    let trimmed = raw.trim().trim_end_matches('.');
    let valid = !trimmed.is_empty()
        && trimmed
            .split('.')
            .all(|c| !c.is_empty() && c.chars().all(|ch| ch.is_ascii_digit()));
    valid.then(|| trimmed.to_string())
}

/// Orders keys like "BIBREF2" before "BIBREF10".
pub fn natural_key_cmp(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let digits = s.len() - s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (head, tail) = s.split_at(s.len() - digits);
        (head, tail.parse().ok())
    }
    let (ha, na) = split(a);
    let (hb, nb) = split(b);
    ha.cmp(hb).then(na.cmp(&nb)).then(a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_slice_handles_multibyte() {
        let t = "né à Fig. 1";
        assert_eq!(char_slice(t, 5, 11), "Fig. 1");
        assert_eq!(char_slice(t, 0, 2), "né");
        assert_eq!(char_slice(t, 3, 3), "");
    }

    #[test]
    fn natural_ordering_of_bib_keys() {
        let mut keys = vec!["BIBREF10", "BIBREF2", "BIBREF0", "b1"];
        keys.sort_by(|a, b| natural_key_cmp(a, b));
        assert_eq!(keys, ["BIBREF0", "BIBREF2", "BIBREF10", "b1"]);
    }

    #[test]
    fn numbering_normalization() {
        assert_eq!(normalize_numbering("2.1."), Some("2.1".into()));
        assert_eq!(normalize_numbering(" 3 "), Some("3".into()));
        assert_eq!(normalize_numbering("II"), None);
        assert_eq!(normalize_numbering("2..1"), None);
        assert_eq!(normalize_numbering(""), None);
    }

    #[test]
    fn numbering_depth() {
        let mut s = Section {
            index: 0,
            heading_text: "x".into(),
            numbering: Some("2.1.3".into()),
            paragraphs: vec![],
        };
        assert_eq!(s.numbering_depth(), 3);
        s.numbering = None;
        assert_eq!(s.numbering_depth(), 1);
    }
}
