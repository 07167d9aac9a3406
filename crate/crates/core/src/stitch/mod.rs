//! Merges the full-text extraction with the figure manifest into a
//! [`RenderTree`]: placement of figures and tables, placeholders for what
//! could not be extracted, the citation link graph, repaired bibliography
//! URLs and the table of contents.

mod links;
mod placement;
mod toc;
mod urls;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use links::{build_links, linkable_citation_spans, CitationLink, LinkGraph, ObjectLink, ReturnLink};
pub use placement::{
    assign_positions, collect_mentions, flush_positions, insert_placeholders, place_objects, Mention, PlacementPlan,
    PlanEntry, PlanSource, Position,
};
pub use toc::{build_toc, TocEntry, TocObject, TocTree};
pub use urls::repair_urls;

use crate::anchors;
use crate::diagnostics::{Diagnostics, WarningCode};
use crate::error::MergeError;
use crate::model::{
    BibEntry, EquationSlot, ExtractedDocument, FigureManifest, Handle, ObjectKind, Section, SectionRef,
};

pub const RENDER_SCHEMA_VERSION: u32 = 1;

pub const NOT_EXTRACTED: &str = "Not extracted; please refer to original document.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderTree {
    pub schema_version: u32,
    pub metadata: RenderMetadata,
    pub body: Vec<RenderBlock>,
    pub toc: TocTree,
    pub link_graph: LinkGraph,
    pub bibliography: Vec<BibEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderMetadata {
    pub paper_id: String,
    pub title: String,
    pub authors: Vec<String>,
    /// BCP 47 language tag for the root element.
    pub lang: String,
}

/// Body content in reading order. The abstract, when present, is the first
/// region of the body under its own heading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RenderBlock {
    Heading(HeadingBlock),
    Paragraph(ParagraphBlock),
    Object(ObjectBlock),
    Placeholder(PlaceholderBlock),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadingBlock {
    pub section: SectionRef,
    pub anchor: String,
    /// Display text including the section number, e.g. "2.1 Data".
    pub text: String,
    /// Effective nesting depth (1 = top-level section), never more than one
    /// deeper than the preceding heading.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParagraphBlock {
    pub section: SectionRef,
    pub paragraph_index: usize,
    pub text: String,
    /// Non-overlapping link spans sorted by start (character offsets).
    pub links: Vec<InlineLink>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InlineLink {
    pub start: usize,
    pub end: usize,
    pub target: InlineTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InlineTarget {
    /// Citation: `anchor` is the span's own id, the link goes to the bib entry.
    Citation { anchor: String, bib_key: String },
    /// Figure/table mention linking to the placed object or placeholder.
    Object { target: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectBlock {
    pub anchor: String,
    pub kind: ObjectKind,
    pub number: Option<u32>,
    pub caption: String,
    pub image_path: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceholderKind {
    Figure,
    Table,
    Equation,
}

impl From<ObjectKind> for PlaceholderKind {
    fn from(k: ObjectKind) -> Self {
        match k {
            ObjectKind::Figure => PlaceholderKind::Figure,
            ObjectKind::Table => PlaceholderKind::Table,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceholderBlock {
    pub anchor: String,
    pub kind: PlaceholderKind,
    pub number: Option<u32>,
    pub text: String,
    /// Caption from the manifest when the object was listed but its image
    /// was not extracted.
    pub caption: Option<String>,
}

/// "Figure 2. Not extracted; please refer to original document."
pub fn placeholder_text(kind: PlaceholderKind, number: Option<u32>) -> String {
    let label = match kind {
        PlaceholderKind::Figure => "Figure",
        PlaceholderKind::Table => "Table",
        PlaceholderKind::Equation => "Equation",
    };
    match number {
        Some(n) if kind != PlaceholderKind::Equation => format!("{label} {n}. {NOT_EXTRACTED}"),
        _ => format!("{label}. {NOT_EXTRACTED}"),
    }
}

#[derive(Debug, Clone)]
pub struct MergeOptions {
    /// Merge even when the manifest names a different paper.
    pub allow_id_mismatch: bool,
    pub lang: String,
}

impl Default for MergeOptions {
    fn default() -> Self {
        Self {
            allow_id_mismatch: false,
            lang: "en".to_string(),
        }
    }
}

/// Full stitching pipeline.
pub fn merge(
    doc: &ExtractedDocument,
    figs: &FigureManifest,
    opts: &MergeOptions,
) -> Result<(RenderTree, Diagnostics), MergeError> {
    let mut diag = Diagnostics::new();
    if !figs.paper_id.is_empty() && figs.paper_id != doc.paper_id {
        if !opts.allow_id_mismatch {
            return Err(MergeError::PaperIdMismatch {
                document: doc.paper_id.clone(),
                manifest: figs.paper_id.clone(),
            });
        }
        diag.warn(
            WarningCode::PaperIdOverride,
            format!("merging manifest for {:?} into {:?}", figs.paper_id, doc.paper_id),
        );
    }

    let plan = place_objects(doc, figs, &mut diag);
    let plan = insert_placeholders(doc, figs, plan);
    let link_graph = build_links(doc);
    let body = assemble_body(doc, figs, &plan, &link_graph);
    let bibliography = doc.bibliography.iter().map(repair_urls).collect();

    let mut tree = RenderTree {
        schema_version: RENDER_SCHEMA_VERSION,
        metadata: RenderMetadata {
            paper_id: doc.paper_id.clone(),
            title: doc.title.clone(),
            authors: doc
                .authors
                .iter()
                .map(|a| a.full_name())
                .filter(|n| !n.is_empty())
                .collect(),
            lang: opts.lang.clone(),
        },
        body,
        toc: TocTree::default(),
        link_graph,
        bibliography,
    };
    tree.toc = build_toc(&tree);
    Ok((tree, diag))
}

/// Display text for a section heading.
pub fn heading_display(section: &Section) -> String {
    let heading = section.heading_text.trim();
    match (&section.numbering, heading.is_empty()) {
        (Some(n), false) => format!("{n} {heading}"),
        (Some(n), true) => n.clone(),
        (None, false) => heading.to_string(),
        (None, true) => format!("Section {}", section.index + 1),
    }
}

fn assemble_body(
    doc: &ExtractedDocument,
    figs: &FigureManifest,
    plan: &PlacementPlan,
    links: &LinkGraph,
) -> Vec<RenderBlock> {
    let anchors = object_anchors(figs, plan);
    let citation_anchors: BTreeMap<(SectionRef, usize, usize), &CitationLink> = links
        .citation_links
        .iter()
        .map(|c| ((c.section, c.paragraph, c.span_index), c))
        .collect();
    let mentions = collect_mentions(doc);

    let mut builder = BodyBuilder {
        figs,
        plan,
        anchors: &anchors,
        blocks: Vec::new(),
        equations_seen: 0,
        prev_depth: 0,
    };

    let paragraph = |section: SectionRef, index: usize| -> ParagraphBlock {
        let p = match section {
            SectionRef::Abstract => &doc.abstract_paragraphs[index],
            SectionRef::Body(s) => &doc.sections[s].paragraphs[index],
        };
        let mut spans: Vec<InlineLink> = Vec::new();
        for (i, c) in p.citation_spans.iter().enumerate() {
            if let Some(link) = citation_anchors.get(&(section, index, i)) {
                spans.push(InlineLink {
                    start: c.start,
                    end: c.end,
                    target: InlineTarget::Citation {
                        anchor: link.anchor.clone(),
                        bib_key: link.bib_key.clone(),
                    },
                });
            }
        }
        for m in mentions.iter().filter(|m| m.section == section && m.paragraph == index) {
            if let Some(target) = anchors.by_handle.get(&m.handle) {
                spans.push(InlineLink {
                    start: m.start,
                    end: m.end,
                    target: InlineTarget::Object { target: target.clone() },
                });
            }
        }
        // Citation spans come first and take precedence over overlapping
        // object mentions.
        let mut links: Vec<InlineLink> = Vec::with_capacity(spans.len());
        for s in spans {
            let overlaps = links.iter().any(|l| s.start < l.end && l.start < s.end);
            if !overlaps && s.start < s.end {
                links.push(s);
            }
        }
        links.sort_by_key(|s| (s.start, s.end));
        ParagraphBlock {
            section,
            paragraph_index: index,
            text: p.text.clone(),
            links,
        }
    };

    let abstract_has_objects = plan.entries.iter().any(|e| {
        matches!(
            e.position,
            Position::After {
                section: SectionRef::Abstract,
                ..
            }
        )
    });
    let trailing_without_sections = doc.sections.is_empty();
    if !doc.abstract_paragraphs.is_empty() || abstract_has_objects {
        builder.blocks.push(RenderBlock::Heading(HeadingBlock {
            section: SectionRef::Abstract,
            anchor: anchors::ABSTRACT.to_string(),
            text: "Abstract".to_string(),
            depth: 1,
        }));
        for i in 0..doc.abstract_paragraphs.len() {
            builder
                .blocks
                .push(RenderBlock::Paragraph(paragraph(SectionRef::Abstract, i)));
            builder.objects_at(Position::After {
                section: SectionRef::Abstract,
                paragraph: i,
            });
        }
    }
    if trailing_without_sections {
        builder.objects_at(Position::Trailing);
    }

    let last = doc.sections.len().checked_sub(1);
    for section in &doc.sections {
        builder.heading(section);
        let slots: Vec<&EquationSlot> = doc
            .equation_slots
            .iter()
            .filter(|e| e.section_index == section.index)
            .collect();
        builder.equations(&slots, None);
        for i in 0..section.paragraphs.len() {
            let sref = SectionRef::Body(section.index);
            builder.blocks.push(RenderBlock::Paragraph(paragraph(sref, i)));
            builder.objects_at(Position::After {
                section: sref,
                paragraph: i,
            });
            builder.equations(&slots, Some(i));
        }
        if Some(section.index) == last {
            builder.objects_at(Position::Trailing);
        }
    }
    builder.blocks
}

struct ObjectAnchors {
    /// Anchor per plan entry, in plan order.
    by_entry: Vec<String>,
    by_handle: BTreeMap<Handle, String>,
}

fn object_anchors(figs: &FigureManifest, plan: &PlacementPlan) -> ObjectAnchors {
    let mut unnumbered: BTreeMap<usize, usize> = BTreeMap::new();
    for kind in [ObjectKind::Figure, ObjectKind::Table] {
        let mut ordinal = 0;
        for (i, o) in figs.objects.iter().enumerate() {
            if o.kind == kind && o.number.is_none() {
                ordinal += 1;
                unnumbered.insert(i, ordinal);
            }
        }
    }
    let mut by_handle = BTreeMap::new();
    let by_entry = plan
        .entries
        .iter()
        .map(|e| match (e.number, &e.source) {
            (Some(n), _) => {
                let a = anchors::object(e.kind, n);
                by_handle.insert(Handle::new(e.kind, n), a.clone());
                a
            }
            (None, PlanSource::Manifest(i)) => anchors::unnumbered_object(e.kind, unnumbered[i]),
            (None, PlanSource::Inferred) => unreachable!("inferred entries are numbered"),
        })
        .collect();
    ObjectAnchors { by_entry, by_handle }
}

struct BodyBuilder<'a> {
    figs: &'a FigureManifest,
    plan: &'a PlacementPlan,
    anchors: &'a ObjectAnchors,
    blocks: Vec<RenderBlock>,
    equations_seen: usize,
    prev_depth: usize,
}

impl BodyBuilder<'_> {
    fn heading(&mut self, section: &Section) {
        let depth = section.numbering_depth().min(self.prev_depth + 1).max(1);
        self.prev_depth = depth;
        self.blocks.push(RenderBlock::Heading(HeadingBlock {
            section: SectionRef::Body(section.index),
            anchor: anchors::section(SectionRef::Body(section.index)),
            text: heading_display(section),
            depth,
        }));
    }

    fn objects_at(&mut self, position: Position) {
        for (idx, entry) in self.plan.at(position) {
            let anchor = self.anchors.by_entry[idx].clone();
            let block = match entry.source {
                PlanSource::Manifest(i) => {
                    let obj = &self.figs.objects[i];
                    match (&obj.image_path, obj.extracted) {
                        (Some(path), true) => RenderBlock::Object(ObjectBlock {
                            anchor,
                            kind: obj.kind,
                            number: obj.number,
                            caption: obj.caption.clone(),
                            image_path: path.clone(),
                        }),
                        _ => RenderBlock::Placeholder(PlaceholderBlock {
                            anchor,
                            kind: obj.kind.into(),
                            number: obj.number,
                            text: placeholder_text(obj.kind.into(), obj.number),
                            caption: (!obj.caption.is_empty()).then(|| obj.caption.clone()),
                        }),
                    }
                }
                PlanSource::Inferred => RenderBlock::Placeholder(PlaceholderBlock {
                    anchor,
                    kind: entry.kind.into(),
                    number: entry.number,
                    text: placeholder_text(entry.kind.into(), entry.number),
                    caption: None,
                }),
            };
            self.blocks.push(block);
        }
    }

    fn equations(&mut self, slots: &[&EquationSlot], after: Option<usize>) {
        for _ in slots.iter().filter(|e| e.after_paragraph == after) {
            self.equations_seen += 1;
            self.blocks.push(RenderBlock::Placeholder(PlaceholderBlock {
                anchor: anchors::equation(self.equations_seen),
                kind: PlaceholderKind::Equation,
                number: None,
                text: placeholder_text(PlaceholderKind::Equation, None),
                caption: None,
            }));
        }
    }
}
