use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::anchors;
use crate::model::{ExtractedDocument, Paragraph, SectionRef};

use super::heading_display;
use super::placement::collect_mentions;

/// Citation and cross-reference graph of one document.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkGraph {
    pub citation_links: Vec<CitationLink>,
    /// Per bib key, one link per citing section to the first mention there,
    /// in section order.
    pub return_links: BTreeMap<String, Vec<ReturnLink>>,
    pub object_links: Vec<ObjectLink>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationLink {
    /// Id of the citation span in the body.
    pub anchor: String,
    pub bib_key: String,
    pub section: SectionRef,
    pub paragraph: usize,
    /// Index into the paragraph's citation spans.
    pub span_index: usize,
    /// Character offset of the span in its paragraph.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnLink {
    pub section: SectionRef,
    pub anchor: String,
    /// Bare section label shown after the bib entry, e.g. "§2".
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectLink {
    pub section: SectionRef,
    pub paragraph: usize,
    pub start: usize,
    pub object_anchor: String,
}

pub fn section_label(doc: &ExtractedDocument, section: SectionRef) -> String {
    match section {
        SectionRef::Abstract => "Abstract".to_string(),
        SectionRef::Body(i) => {
            let s = &doc.sections[i];
            match &s.numbering {
                Some(n) => format!("§{n}"),
                None if !s.heading_text.trim().is_empty() => heading_display(s),
                None => format!("§{}", i + 1),
            }
        }
    }
}

/// Indices of citation spans in offset order, skipping any span that overlaps
/// an earlier one.
pub fn linkable_citation_spans(p: &Paragraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.citation_spans.len()).collect();
    order.sort_by_key(|&i| (p.citation_spans[i].start, p.citation_spans[i].end));
    let mut end = 0;
    order
        .into_iter()
        .filter(|&i| {
            let span = &p.citation_spans[i];
            if span.start < end || span.start >= span.end {
                return false;
            }
            end = span.end;
            true
        })
        .collect()
}

/// Builds citation links for every resolved span, one return link per
/// (key, section) pointing at the first mention, and object links for
/// every handle mention.
pub fn build_links(doc: &ExtractedDocument) -> LinkGraph {
    let mut graph = LinkGraph::default();
    let mut ordinals: BTreeMap<(String, SectionRef), usize> = BTreeMap::new();
    let keys: BTreeSet<&str> = doc.bibliography.iter().map(|b| b.key.as_str()).collect();

    for (section, paragraph, p) in doc.paragraphs() {
        for span_index in linkable_citation_spans(p) {
            let span = &p.citation_spans[span_index];
            let Some(key) = span.bib_key().filter(|k| keys.contains(k)) else {
                continue;
            };
            let n = ordinals.entry((key.to_string(), section)).or_insert(0);
            let anchor = anchors::citation(key, section, *n);
            if *n == 0 {
                graph.return_links.entry(key.to_string()).or_default().push(ReturnLink {
                    section,
                    anchor: anchor.clone(),
                    label: section_label(doc, section),
                });
            }
            *n += 1;
            graph.citation_links.push(CitationLink {
                anchor,
                bib_key: key.to_string(),
                section,
                paragraph,
                span_index,
                offset: span.start,
            });
        }
    }

    for m in collect_mentions(doc) {
        graph.object_links.push(ObjectLink {
            section: m.section,
            paragraph: m.paragraph,
            start: m.start,
            object_anchor: anchors::object(m.handle.kind, m.handle.number),
        });
    }
    graph
}
