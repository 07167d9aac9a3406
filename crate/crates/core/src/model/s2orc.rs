//! Reader and writer for the S2ORC-shaped full-text JSON envelope.
//!
//! Accepted layout (fields may also live under `pdf_parse`, and `title` /
//! `authors` under `metadata`):
//!
//! ```text
//! { paper_id, title, authors: [{first, middle, last, suffix}],
//!   abstract: [paragraph] | "text",
//!   body_text: [paragraph + {section, sec_num}], back_matter: [...],
//!   bib_entries: {KEY: {raw_text, title, authors, venue, year, urls, link, other_ids}},
//!   ref_entries: {KEY: {type, num, text}} }
//! paragraph = { text, cite_spans: [{start, end, ref_id}], ref_spans: [...], eq_spans: [...] }
//! ```
//!
//! A body paragraph whose text is the literal `EQUATION` marker (or whose
//! equation spans cover the whole text) becomes an [`EquationSlot`].

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use super::{
    natural_key_cmp, normalize_handle, normalize_numbering, AuthorName, BibEntry, BibStructured, CitationSpan,
    EquationSlot, ExtractedDocument, Handle, ObjectKind, ObjectRef, Paragraph, Section,
};
use crate::diagnostics::{Diagnostics, WarningCode};
use crate::error::ParseError;

const EQUATION_MARKER: &str = "EQUATION";

pub fn parse_extraction(raw: &[u8]) -> Result<(ExtractedDocument, Diagnostics), ParseError> {
    let mut diag = Diagnostics::new();
    let text = decode_utf8(raw, &mut diag);
    let root: Value = serde_json::from_str(&text).map_err(|e| ParseError::MalformedInput(e.to_string()))?;
    let root = root
        .as_object()
        .ok_or_else(|| ParseError::MalformedInput("top level is not an object".into()))?;

    let paper_id = match root.get("paper_id") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => return Err(ParseError::MalformedInput("missing paper_id".into())),
    };
    let parse = root.get("pdf_parse").and_then(Value::as_object).unwrap_or(root);
    let metadata = root.get("metadata").and_then(Value::as_object);
    let lookup = |key: &str| -> Option<&Value> {
        root.get(key)
            .filter(|v| !v.is_null())
            .or_else(|| parse.get(key).filter(|v| !v.is_null()))
            .or_else(|| metadata.and_then(|m| m.get(key)).filter(|v| !v.is_null()))
    };

    let title = lookup("title").and_then(Value::as_str).unwrap_or("").trim().to_string();
    let authors = lookup("authors").map(parse_authors).unwrap_or_default();

    let bibliography = parse_bibliography(lookup("bib_entries"), &mut diag);
    let bib_keys: BTreeSet<&str> = bibliography.iter().map(|b| b.key.as_str()).collect();
    let ref_entries = lookup("ref_entries").and_then(Value::as_object);

    let ctx = SpanContext {
        bib_keys: &bib_keys,
        ref_entries,
    };

    let abstract_paragraphs = match lookup("abstract") {
        Some(Value::String(s)) if !s.trim().is_empty() => vec![Paragraph {
            text: s.clone(),
            ..Paragraph::default()
        }],
        Some(Value::Array(items)) => items
            .iter()
            .filter_map(Value::as_object)
            .map(|p| ctx.paragraph(p, &mut diag))
            .collect(),
        _ => Vec::new(),
    };

    let mut sections: Vec<Section> = Vec::new();
    let mut equation_slots = Vec::new();
    let mut current_key: Option<(String, Option<String>)> = None;
    let body = ["body_text", "back_matter"]
        .into_iter()
        .filter_map(|k| lookup(k).and_then(Value::as_array))
        .flatten()
        .filter_map(Value::as_object);
    for p in body {
        let heading = p
            .get("section")
            .and_then(Value::as_str)
            .unwrap_or("")
            .trim()
            .to_string();
        let sec_num = match p.get("sec_num") {
            Some(Value::String(s)) => Some(s.clone()),
            Some(Value::Number(n)) => Some(n.to_string()),
            _ => None,
        };
        let key = (heading.clone(), sec_num.clone());
        if current_key.as_ref() != Some(&key) {
            let numbering = match sec_num.as_deref() {
                None => None,
                Some(raw) => {
                    let n = normalize_numbering(raw);
                    if n.is_none() && !raw.trim().is_empty() {
                        diag.warn(
                            WarningCode::InvalidNumbering,
                            format!("section {heading:?}: numbering {raw:?} is not dotted digits"),
                        );
                    }
                    n
                }
            };
            sections.push(Section {
                index: sections.len(),
                heading_text: heading,
                numbering,
                paragraphs: Vec::new(),
            });
            current_key = Some(key);
        }
        let section = sections.last_mut().expect("section pushed above");
        if let Some(label) = equation_label(p) {
            equation_slots.push(EquationSlot {
                section_index: section.index,
                after_paragraph: section.paragraphs.len().checked_sub(1),
                label,
            });
            continue;
        }
        section.paragraphs.push(ctx.paragraph(p, &mut diag));
    }

    if title.is_empty() && sections.is_empty() && abstract_paragraphs.is_empty() {
        return Err(ParseError::EmptyDocument);
    }

    let doc = ExtractedDocument {
        paper_id,
        title,
        authors,
        abstract_paragraphs,
        sections,
        bibliography,
        equation_slots,
        source_hash: hex_digest(raw),
    };
    Ok((doc, diag))
}

fn hex_digest(raw: &[u8]) -> String {
    Sha256::digest(raw).iter().map(|b| format!("{b:02x}")).collect()
}

fn decode_utf8(raw: &[u8], diag: &mut Diagnostics) -> String {
    match std::str::from_utf8(raw) {
        Ok(s) => s.to_string(),
        Err(_) => {
            let lossy = String::from_utf8_lossy(raw).into_owned();
            let original = raw.windows(3).filter(|w| *w == [0xEF, 0xBF, 0xBD]).count();
            let replaced = lossy.matches('\u{FFFD}').count() - original;
            diag.warn(
                WarningCode::InvalidUtf8,
                format!("{replaced} invalid UTF-8 sequence(s) replaced"),
            );
            lossy
        }
    }
}

/// `Some(label)` when the paragraph is a display-equation marker.
fn equation_label(p: &Map<String, Value>) -> Option<Option<String>> {
    let text = p.get("text").and_then(Value::as_str).unwrap_or("");
    let eq_spans = p.get("eq_spans").and_then(Value::as_array);
    let trimmed = text.trim();
    let covered = eq_spans.is_some_and(|spans| {
        let len = text.chars().count();
        !trimmed.is_empty()
            && spans.iter().any(|s| {
                let start = s.get("start").and_then(Value::as_u64).unwrap_or(u64::MAX);
                let end = s.get("end").and_then(Value::as_u64).unwrap_or(0);
                let lead = (text.chars().count() - text.trim_start().chars().count()) as u64;
                let trail = (text.chars().count() - text.trim_end().chars().count()) as u64;
                start <= lead && end + trail >= len as u64
            })
    });
    if trimmed != EQUATION_MARKER && !covered {
        return None;
    }
    let label = eq_spans
        .and_then(|s| s.first())
        .and_then(|s| s.get("eq_num"))
        .and_then(Value::as_str)
        .map(str::to_string);
    Some(label)
}

fn parse_authors(v: &Value) -> Vec<AuthorName> {
    let Some(items) = v.as_array() else {
        return Vec::new();
    };
    items
        .iter()
        .filter_map(|a| match a {
            Value::String(s) => Some(AuthorName {
                last: s.trim().to_string(),
                ..AuthorName::default()
            }),
            Value::Object(o) => {
                let s = |k: &str| o.get(k).and_then(Value::as_str).unwrap_or("").trim().to_string();
                let middle = o
                    .get("middle")
                    .and_then(Value::as_array)
                    .map(|m| m.iter().filter_map(Value::as_str).map(str::to_string).collect())
                    .unwrap_or_default();
                let name = AuthorName {
                    first: s("first"),
                    middle,
                    last: s("last"),
                    suffix: s("suffix"),
                };
                (!name.full_name().is_empty()).then_some(name)
            }
            _ => None,
        })
        .collect()
}

fn parse_bibliography(v: Option<&Value>, diag: &mut Diagnostics) -> Vec<BibEntry> {
    let Some(map) = v.and_then(Value::as_object) else {
        return Vec::new();
    };
    let mut keys: Vec<&String> = map.keys().collect();
    keys.sort_by(|a, b| natural_key_cmp(a, b));
    keys.into_iter()
        .filter_map(|key| {
            let entry = map[key].as_object()?;
            Some(parse_bib_entry(key, entry, diag))
        })
        .collect()
}

fn parse_bib_entry(key: &str, e: &Map<String, Value>, _diag: &mut Diagnostics) -> BibEntry {
    let s = |k: &str| e.get(k).and_then(Value::as_str).unwrap_or("").trim().to_string();
    let authors: Vec<String> = e
        .get("authors")
        .map(parse_authors)
        .unwrap_or_default()
        .iter()
        .map(AuthorName::full_name)
        .collect();
    let year = match e.get("year") {
        Some(Value::Number(n)) => n.as_i64().map(|y| y as i32),
        Some(Value::String(s)) => s.trim().parse().ok(),
        _ => None,
    };
    let doi = e
        .get("other_ids")
        .and_then(|ids| ids.get("DOI"))
        .and_then(|d| match d {
            Value::Array(a) => a.first().and_then(Value::as_str),
            Value::String(s) => Some(s.as_str()),
            _ => None,
        })
        .or_else(|| e.get("doi").and_then(Value::as_str))
        .map(str::to_string);
    let structured = BibStructured {
        authors,
        title: s("title"),
        venue: s("venue"),
        year,
        doi,
    };
    let has_structure = structured != BibStructured::default();
    let url = e
        .get("urls")
        .and_then(Value::as_array)
        .and_then(|u| u.first())
        .and_then(Value::as_str)
        .or_else(|| e.get("url").and_then(Value::as_str))
        .or_else(|| e.get("link").and_then(Value::as_str))
        .map(str::trim)
        .filter(|u| !u.is_empty())
        .map(str::to_string);
    let mut raw_text = s("raw_text");
    if raw_text.is_empty() && has_structure {
        raw_text = compose_reference(&structured);
    }
    BibEntry {
        key: key.to_string(),
        raw_text,
        url,
        structured: has_structure.then_some(structured),
    }
}

fn compose_reference(b: &BibStructured) -> String {
    let mut parts = Vec::new();
    if !b.authors.is_empty() {
        parts.push(b.authors.join(", "));
    }
    if !b.title.is_empty() {
        parts.push(b.title.clone());
    }
    if !b.venue.is_empty() {
        parts.push(b.venue.clone());
    }
    if let Some(y) = b.year {
        parts.push(y.to_string());
    }
    let mut out = parts.join(". ");
    if !out.is_empty() {
        out.push('.');
    }
    out
}

struct SpanContext<'a> {
    bib_keys: &'a BTreeSet<&'a str>,
    ref_entries: Option<&'a Map<String, Value>>,
}

struct RawSpan {
    start: usize,
    end: usize,
    text: String,
    ref_id: Option<String>,
}

impl SpanContext<'_> {
    fn paragraph(&self, p: &Map<String, Value>, diag: &mut Diagnostics) -> Paragraph {
        let text = p.get("text").and_then(Value::as_str).unwrap_or("").to_string();
        let len = text.chars().count();

        let cites = clean_spans(raw_spans(p.get("cite_spans")), len, "citation", diag);
        let citation_spans = cites
            .into_iter()
            .map(|s| {
                let resolved = s.ref_id.as_deref().is_some_and(|k| self.bib_keys.contains(k));
                if !resolved {
                    diag.warn(
                        WarningCode::UnresolvedCitation,
                        format!("citation {:?} ({:?}) has no bibliography entry", s.text, s.ref_id),
                    );
                }
                CitationSpan {
                    start: s.start,
                    end: s.end,
                    ref_id: s.ref_id,
                    resolved,
                }
            })
            .collect();

        let refs = clean_spans(raw_spans(p.get("ref_spans")), len, "object reference", diag);
        let object_refs = refs
            .into_iter()
            .filter_map(|s| {
                let entry = s
                    .ref_id
                    .as_deref()
                    .and_then(|id| self.ref_entries.and_then(|r| r.get(id)));
                let entry_kind = entry
                    .and_then(|e| e.get("type"))
                    .and_then(Value::as_str)
                    .map(|t| ObjectKind::parse(t).ok_or(()));
                // References to sections or equations are not object mentions.
                if matches!(entry_kind, Some(Err(()))) {
                    return None;
                }
                let span_text = if s.text.is_empty() {
                    super::char_slice(&text, s.start, s.end).to_string()
                } else {
                    s.text.clone()
                };
                let handle = normalize_handle(&span_text).or_else(|| {
                    let kind = entry_kind?.ok()?;
                    let num = match entry?.get("num")? {
                        Value::String(n) => n.trim().parse().ok()?,
                        Value::Number(n) => u32::try_from(n.as_u64()?).ok()?,
                        _ => return None,
                    };
                    Some(Handle::new(kind, num))
                });
                if handle.is_none() {
                    diag.warn(
                        WarningCode::UnparseableHandle,
                        format!("object mention {span_text:?} has no integer number"),
                    );
                }
                Some(ObjectRef {
                    start: s.start,
                    end: s.end,
                    ref_id: s.ref_id,
                    handle,
                })
            })
            .collect();

        Paragraph {
            text,
            citation_spans,
            object_refs,
        }
    }
}

fn raw_spans(v: Option<&Value>) -> Vec<RawSpan> {
    let Some(items) = v.and_then(Value::as_array) else {
        return Vec::new();
    };
    items
        .iter()
        .filter_map(|s| {
            let start = s.get("start")?.as_u64()? as usize;
            let end = s.get("end")?.as_u64()? as usize;
            let text = s.get("text").and_then(Value::as_str).unwrap_or("").to_string();
            let ref_id = s.get("ref_id").and_then(Value::as_str).map(str::to_string);
            Some(RawSpan {
                start,
                end,
                text,
                ref_id,
            })
        })
        .collect()
}

/// Drops out-of-bounds spans, sorts by start, and resolves overlaps by keeping
/// the longer span (the earlier one on ties).
fn clean_spans(spans: Vec<RawSpan>, len: usize, what: &str, diag: &mut Diagnostics) -> Vec<RawSpan> {
    let mut valid: Vec<RawSpan> = spans
        .into_iter()
        .filter(|s| {
            let ok = s.start < s.end && s.end <= len;
            if !ok {
                diag.warn(
                    WarningCode::SpanOutOfBounds,
                    format!("{what} span {}..{} outside text of length {len}", s.start, s.end),
                );
            }
            ok
        })
        .collect();
    valid.sort_by_key(|s| (s.start, s.end));
    let mut kept: Vec<RawSpan> = Vec::with_capacity(valid.len());
    for span in valid {
        match kept.last() {
            Some(prev) if span.start < prev.end => {
                let (prev_len, len) = (prev.end - prev.start, span.end - span.start);
                diag.warn(
                    WarningCode::OverlappingSpan,
                    format!(
                        "{what} spans {}..{} and {}..{} overlap; keeping the longer",
                        prev.start, prev.end, span.start, span.end
                    ),
                );
                if len > prev_len {
                    kept.pop();
                    kept.push(span);
                }
            }
            _ => kept.push(span),
        }
    }
    kept
}

/// Writes a document back into the S2ORC-shaped envelope accepted by
/// [`parse_extraction`].
pub fn to_s2orc_json(doc: &ExtractedDocument) -> Value {
    let mut ref_entries = BTreeMap::new();
    let para = |p: &Paragraph, ref_entries: &mut BTreeMap<String, Value>| -> Map<String, Value> {
        let cite_spans: Vec<Value> = p
            .citation_spans
            .iter()
            .map(|c| {
                json!({
                    "start": c.start,
                    "end": c.end,
                    "text": super::char_slice(&p.text, c.start, c.end),
                    "ref_id": c.ref_id,
                })
            })
            .collect();
        let ref_spans: Vec<Value> = p
            .object_refs
            .iter()
            .map(|r| {
                if let (Some(id), Some(h)) = (&r.ref_id, r.handle) {
                    ref_entries.insert(id.clone(), json!({"type": h.kind.slug(), "num": h.number.to_string()}));
                }
                json!({
                    "start": r.start,
                    "end": r.end,
                    "text": super::char_slice(&p.text, r.start, r.end),
                    "ref_id": r.ref_id,
                })
            })
            .collect();
        let mut m = Map::new();
        m.insert("text".into(), Value::String(p.text.clone()));
        m.insert("cite_spans".into(), Value::Array(cite_spans));
        m.insert("ref_spans".into(), Value::Array(ref_spans));
        m
    };

    let abstract_: Vec<Value> = doc
        .abstract_paragraphs
        .iter()
        .map(|p| Value::Object(para(p, &mut ref_entries)))
        .collect();

    let mut body = Vec::new();
    for s in &doc.sections {
        let tag = |m: &mut Map<String, Value>| {
            m.insert("section".into(), Value::String(s.heading_text.clone()));
            m.insert("sec_num".into(), json!(s.numbering));
        };
        let eqs: Vec<&EquationSlot> = doc
            .equation_slots
            .iter()
            .filter(|e| e.section_index == s.index)
            .collect();
        let push_eqs = |after: Option<usize>, body: &mut Vec<Value>| {
            for e in eqs.iter().filter(|e| e.after_paragraph == after) {
                let mut m = Map::new();
                m.insert("text".into(), Value::String(EQUATION_MARKER.into()));
                m.insert(
                    "eq_spans".into(),
                    json!([{"start": 0, "end": EQUATION_MARKER.len(), "text": EQUATION_MARKER, "eq_num": e.label}]),
                );
                tag(&mut m);
                body.push(Value::Object(m));
            }
        };
        push_eqs(None, &mut body);
        for (i, p) in s.paragraphs.iter().enumerate() {
            let mut m = para(p, &mut ref_entries);
            tag(&mut m);
            body.push(Value::Object(m));
            push_eqs(Some(i), &mut body);
        }
    }

    let bib: Map<String, Value> = doc
        .bibliography
        .iter()
        .map(|b| {
            let mut m = Map::new();
            m.insert("raw_text".into(), Value::String(b.raw_text.clone()));
            m.insert("urls".into(), json!(b.url.iter().collect::<Vec<_>>()));
            if let Some(st) = &b.structured {
                m.insert("title".into(), Value::String(st.title.clone()));
                m.insert(
                    "authors".into(),
                    Value::Array(st.authors.iter().map(|a| json!(a)).collect()),
                );
                m.insert("venue".into(), Value::String(st.venue.clone()));
                m.insert("year".into(), json!(st.year));
                m.insert("other_ids".into(), json!({"DOI": st.doi.iter().collect::<Vec<_>>()}));
            }
            (b.key.clone(), Value::Object(m))
        })
        .collect();

    json!({
        "paper_id": doc.paper_id,
        "title": doc.title,
        "authors": doc.authors,
        "abstract": abstract_,
        "body_text": body,
        "bib_entries": bib,
        "ref_entries": ref_entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(extra_bib: &str, cite_ref: &str) -> String {
        format!(
            r#"{{"paper_id": "p1", "title": "T",
                "body_text": [{{"text": "See [3].", "section": "Intro", "sec_num": "1",
                                "cite_spans": [{{"start": 4, "end": 7, "text": "[3]", "ref_id": "{cite_ref}"}}],
                                "ref_spans": []}}],
                "bib_entries": {{{extra_bib}}}, "ref_entries": {{}}}}"#
        )
    }

    #[test]
    fn minimal_document_parses() {
        let (doc, diag) = parse_extraction(minimal("", "BIBREF3").as_bytes()).unwrap();
        assert_eq!(doc.title, "T");
        assert_eq!(doc.sections.len(), 1);
        assert_eq!(doc.sections[0].paragraphs.len(), 1);
        assert!(doc.bibliography.is_empty());
        assert_eq!(diag.count(WarningCode::UnresolvedCitation), 1);
    }

    #[test]
    fn unresolved_citation_is_kept_and_flagged() {
        let (doc, _) = parse_extraction(minimal("", "BIBREF3").as_bytes()).unwrap();
        let span = &doc.sections[0].paragraphs[0].citation_spans[0];
        assert!(!span.resolved);
        assert_eq!(span.ref_id.as_deref(), Some("BIBREF3"));
        assert_eq!(span.bib_key(), None);
    }

    #[test]
    fn resolved_citation() {
        let bib = r#""BIBREF3": {"raw_text": "A. Author. Paper. 2010."}"#;
        let (doc, diag) = parse_extraction(minimal(bib, "BIBREF3").as_bytes()).unwrap();
        assert_eq!(
            doc.sections[0].paragraphs[0].citation_spans[0].bib_key(),
            Some("BIBREF3")
        );
        assert!(diag.is_empty());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            parse_extraction(b"not json"),
            Err(ParseError::MalformedInput(_))
        ));
        assert!(matches!(parse_extraction(b"[1,2]"), Err(ParseError::MalformedInput(_))));
        assert!(matches!(
            parse_extraction(br#"{"title": "x"}"#),
            Err(ParseError::MalformedInput(_))
        ));
    }

    #[test]
    fn empty_document() {
        let r = parse_extraction(br#"{"paper_id": "x", "title": "", "body_text": []}"#);
        assert!(matches!(r, Err(ParseError::EmptyDocument)));
    }

    #[test]
    fn overlapping_citations_keep_longer() {
        let raw = r#"{"paper_id": "p", "title": "T", "body_text": [{"text": "Smith et al. 2020 said", "section": "A",
            "cite_spans": [{"start": 0, "end": 5, "ref_id": "b0"}, {"start": 0, "end": 17, "ref_id": "b1"}]}],
            "bib_entries": {"b0": {"raw_text": "x"}, "b1": {"raw_text": "y"}}}"#;
        let (doc, diag) = parse_extraction(raw.as_bytes()).unwrap();
        let spans = &doc.sections[0].paragraphs[0].citation_spans;
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].ref_id.as_deref(), Some("b1"));
        assert_eq!(diag.count(WarningCode::OverlappingSpan), 1);
    }

    #[test]
    fn out_of_bounds_span_dropped() {
        let raw = r#"{"paper_id": "p", "title": "T", "body_text": [{"text": "abc", "section": "A",
            "cite_spans": [{"start": 1, "end": 9, "ref_id": "b0"}, {"start": 2, "end": 2, "ref_id": "b0"}]}]}"#;
        let (doc, diag) = parse_extraction(raw.as_bytes()).unwrap();
        assert!(doc.sections[0].paragraphs[0].citation_spans.is_empty());
        assert_eq!(diag.count(WarningCode::SpanOutOfBounds), 2);
    }

    #[test]
    fn invalid_utf8_is_replaced_and_counted() {
        let mut raw = br#"{"paper_id": "p", "title": "T"#.to_vec();
        raw.push(0xFF);
        raw.extend_from_slice(br#"", "body_text": []}"#);
        let (doc, diag) = parse_extraction(&raw).unwrap();
        assert_eq!(doc.title, "T\u{FFFD}");
        assert_eq!(diag.count(WarningCode::InvalidUtf8), 1);
    }

    #[test]
    fn equation_paragraph_becomes_slot() {
        let raw = r#"{"paper_id": "p", "title": "T", "body_text": [
            {"text": "First.", "section": "M", "sec_num": "2"},
            {"text": "EQUATION", "section": "M", "sec_num": "2", "eq_spans": [{"start": 0, "end": 8, "eq_num": "(1)"}]},
            {"text": "Second.", "section": "M", "sec_num": "2"}]}"#;
        let (doc, _) = parse_extraction(raw.as_bytes()).unwrap();
        assert_eq!(doc.sections[0].paragraphs.len(), 2);
        assert_eq!(
            doc.equation_slots,
            vec![EquationSlot {
                section_index: 0,
                after_paragraph: Some(0),
                label: Some("(1)".into())
            }]
        );
    }

    #[test]
    fn sections_grouped_by_consecutive_heading() {
        let raw = r#"{"paper_id": "p", "title": "T", "body_text": [
            {"text": "a", "section": "Intro", "sec_num": "1."},
            {"text": "b", "section": "Intro", "sec_num": "1."},
            {"text": "c", "section": "Related Works", "sec_num": "II"},
            {"text": "d", "section": "Details", "sec_num": "2.1"}]}"#;
        let (doc, diag) = parse_extraction(raw.as_bytes()).unwrap();
        assert_eq!(doc.sections.len(), 3);
        assert_eq!(doc.sections[0].numbering.as_deref(), Some("1"));
        assert_eq!(doc.sections[0].paragraphs.len(), 2);
        assert_eq!(doc.sections[1].numbering, None);
        assert_eq!(doc.sections[2].numbering.as_deref(), Some("2.1"));
        assert_eq!(diag.count(WarningCode::InvalidNumbering), 1);
        let indices: Vec<_> = doc.sections.iter().map(|s| s.index).collect();
        assert_eq!(indices, [0, 1, 2]);
    }

    #[test]
    fn object_refs_use_text_then_ref_entries() {
        let raw = r#"{"paper_id": "p", "title": "T", "body_text": [
            {"text": "As in Fig. 2 and the panel and Sec. 3.", "section": "A",
             "ref_spans": [{"start": 6, "end": 12, "ref_id": "FIGREF1"},
                           {"start": 21, "end": 26, "ref_id": "FIGREF0"},
                           {"start": 31, "end": 37, "ref_id": "SECREF0"}]}],
            "ref_entries": {"FIGREF0": {"type": "figure", "num": "1"},
                            "FIGREF1": {"type": "figure", "num": "2"},
                            "SECREF0": {"type": "section"}}}"#;
        let (doc, _) = parse_extraction(raw.as_bytes()).unwrap();
        let refs = &doc.sections[0].paragraphs[0].object_refs;
        assert_eq!(refs.len(), 2);
        assert_eq!(refs[0].handle, Some(Handle::new(ObjectKind::Figure, 2)));
        assert_eq!(refs[1].handle, Some(Handle::new(ObjectKind::Figure, 1)));
    }

    #[test]
    fn nested_pdf_parse_layout() {
        let raw = r#"{"paper_id": 42, "metadata": {"title": "Nested", "authors": [{"first": "Ada", "middle": [], "last": "Lovelace", "suffix": ""}]},
            "pdf_parse": {"abstract": [{"text": "Abs."}], "body_text": [], "bib_entries": {}}}"#;
        let (doc, _) = parse_extraction(raw.as_bytes()).unwrap();
        assert_eq!(doc.paper_id, "42");
        assert_eq!(doc.title, "Nested");
        assert_eq!(doc.authors[0].full_name(), "Ada Lovelace");
        assert_eq!(doc.abstract_paragraphs[0].text, "Abs.");
    }

    #[test]
    fn bibliography_in_natural_key_order() {
        let raw = r#"{"paper_id": "p", "title": "T", "bib_entries": {
            "BIBREF10": {"title": "Ten", "authors": [{"first": "A", "last": "B"}], "year": 2001, "venue": "V"},
            "BIBREF2": {"raw_text": "Two"}}}"#;
        let (doc, _) = parse_extraction(raw.as_bytes()).unwrap();
        let keys: Vec<_> = doc.bibliography.iter().map(|b| b.key.as_str()).collect();
        assert_eq!(keys, ["BIBREF2", "BIBREF10"]);
        assert_eq!(doc.bibliography[1].raw_text, "A B. Ten. V. 2001.");
    }

    #[test]
    fn digest_is_deterministic() {
        let raw = minimal("", "x");
        let (a, _) = parse_extraction(raw.as_bytes()).unwrap();
        let (b, _) = parse_extraction(raw.as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.source_hash.len(), 64);
    }
}
