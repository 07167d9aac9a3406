//! Object placement: every figure or table goes right after the paragraph
//! that first mentions it, and a mention of number k also pulls in every
//! not-yet-placed object of the same kind numbered below k. An object that is
//! never mentioned follows the next lower-numbered object of its kind, so
//! unmentioned objects still appear in numeric order.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostics, WarningCode};
use crate::model::{scan_handles, ExtractedDocument, FigureManifest, Handle, ObjectKind, SectionRef};

/// Where a block is inserted in reading order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    After {
        section: SectionRef,
        paragraph: usize,
    },
    /// After the last body paragraph, before the references.
    Trailing,
}

/// What a plan entry stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanSource {
    /// Index into the manifest's object list.
    Manifest(usize),
    /// Mentioned in the text, or numbered between two manifest objects, but
    /// absent from the manifest.
    Inferred,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub kind: ObjectKind,
    pub number: Option<u32>,
    pub source: PlanSource,
    pub position: Position,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementPlan {
    pub entries: Vec<PlanEntry>,
}

impl PlacementPlan {
    /// Entries at one position, figures before tables, numbered ones in
    /// ascending order, unnumbered last within their kind.
    pub fn at(&self, position: Position) -> Vec<(usize, &PlanEntry)> {
        let mut out: Vec<(usize, &PlanEntry)> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.position == position)
            .collect();
        out.sort_by_key(|(_, e)| (e.kind, e.number.is_none(), e.number, manifest_index(e)));
        out
    }

    pub fn find(&self, handle: Handle) -> Option<&PlanEntry> {
        self.entries
            .iter()
            .find(|e| e.kind == handle.kind && e.number == Some(handle.number))
    }
}

fn manifest_index(e: &PlanEntry) -> usize {
    match e.source {
        PlanSource::Manifest(i) => i,
        PlanSource::Inferred => usize::MAX,
    }
}

/// A handle mention located in reading order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mention {
    pub section: SectionRef,
    pub paragraph: usize,
    pub start: usize,
    pub end: usize,
    pub handle: Handle,
    /// Index into the paragraph's `object_refs`; `None` for scanned mentions.
    pub ref_index: Option<usize>,
}

/// Handle mentions in reading order. Paragraphs without extractor-provided
/// object references are scanned for handles instead.
pub fn collect_mentions(doc: &ExtractedDocument) -> Vec<Mention> {
    let mut out = Vec::new();
    for (section, paragraph, p) in doc.paragraphs() {
        if p.object_refs.is_empty() {
            out.extend(scan_handles(&p.text).into_iter().map(|(start, end, handle)| Mention {
                section,
                paragraph,
                start,
                end,
                handle,
                ref_index: None,
            }));
        } else {
            out.extend(p.object_refs.iter().enumerate().filter_map(|(i, r)| {
                Some(Mention {
                    section,
                    paragraph,
                    start: r.start,
                    end: r.end,
                    handle: r.handle?,
                    ref_index: Some(i),
                })
            }));
        }
    }
    out
}

/// Flush-queue placement for numbered items of every kind. Returns one
/// position per input item, in input order.
pub fn flush_positions(mentions: &[Mention], items: &[(ObjectKind, u32)]) -> Vec<Position> {
    let mut queues: BTreeMap<ObjectKind, BTreeSet<(u32, usize)>> = BTreeMap::new();
    for (i, &(kind, n)) in items.iter().enumerate() {
        queues.entry(kind).or_default().insert((n, i));
    }
    let mut positions = vec![Position::Trailing; items.len()];
    for m in mentions {
        let Some(queue) = queues.get_mut(&m.handle.kind) else {
            continue;
        };
        let position = Position::After {
            section: m.section,
            paragraph: m.paragraph,
        };
        while let Some(&(n, i)) = queue.first() {
            if n > m.handle.number {
                break;
            }
            queue.pop_first();
            positions[i] = position;
        }
    }
    positions
}

/// Placement for numbered items: mentioned items use the flush queue, and an
/// unmentioned item shares the position of the next lower-numbered item of its
/// kind (or the flush position when it has none). Returns one position per
/// input item, in input order.
pub fn assign_positions(mentions: &[Mention], items: &[(ObjectKind, u32)]) -> Vec<Position> {
    let mentioned: BTreeSet<(ObjectKind, u32)> = mentions.iter().map(|m| (m.handle.kind, m.handle.number)).collect();
    let mut positions = flush_positions(mentions, items);
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&i| items[i]);
    let mut previous: Option<(ObjectKind, Position)> = None;
    for i in order {
        let (kind, n) = items[i];
        if !mentioned.contains(&(kind, n)) {
            if let Some((k, p)) = previous {
                if k == kind {
                    positions[i] = p;
                }
            }
        }
        previous = Some((kind, positions[i]));
    }
    positions
}

/// Positions for every manifest object. Unnumbered objects trail their kind.
pub fn place_objects(doc: &ExtractedDocument, figs: &FigureManifest, diag: &mut Diagnostics) -> PlacementPlan {
    let mentions = collect_mentions(doc);
    let mut flagged = BTreeSet::new();
    for m in mentions.iter().filter(|m| m.section == SectionRef::Abstract) {
        if flagged.insert(m.handle) {
            diag.warn(
                WarningCode::MentionBeforeFirstSection,
                format!("{} is first mentioned before the first section", m.handle),
            );
        }
    }
    let numbered: Vec<(usize, ObjectKind, u32)> = figs
        .objects
        .iter()
        .enumerate()
        .filter_map(|(i, o)| Some((i, o.kind, o.number?)))
        .collect();
    let items: Vec<(ObjectKind, u32)> = numbered.iter().map(|&(_, k, n)| (k, n)).collect();
    let positions = assign_positions(&mentions, &items);

    let mut entries: Vec<PlanEntry> = numbered
        .iter()
        .zip(positions)
        .map(|(&(i, kind, n), position)| PlanEntry {
            kind,
            number: Some(n),
            source: PlanSource::Manifest(i),
            position,
        })
        .collect();
    entries.extend(
        figs.objects
            .iter()
            .enumerate()
            .filter(|(_, o)| o.number.is_none())
            .map(|(i, o)| PlanEntry {
                kind: o.kind,
                number: None,
                source: PlanSource::Manifest(i),
                position: Position::Trailing,
            }),
    );
    PlacementPlan { entries }
}

/// Adds entries for objects inferred to exist but missing from the manifest:
/// every mentioned handle, and every number strictly between two manifest
/// numbers of the same kind. Nothing is inferred past the largest manifest
/// number. Positions of all numbered entries are recomputed over the combined
/// set.
pub fn insert_placeholders(doc: &ExtractedDocument, figs: &FigureManifest, plan: PlacementPlan) -> PlacementPlan {
    let mentions = collect_mentions(doc);
    let present: BTreeSet<(ObjectKind, u32)> = figs.objects.iter().filter_map(|o| Some((o.kind, o.number?))).collect();

    let mut missing: BTreeSet<(ObjectKind, u32)> = mentions
        .iter()
        .map(|m| (m.handle.kind, m.handle.number))
        .filter(|h| !present.contains(h))
        .collect();
    for kind in [ObjectKind::Figure, ObjectKind::Table] {
        let numbers: Vec<u32> = present.iter().filter(|(k, _)| *k == kind).map(|&(_, n)| n).collect();
        for pair in numbers.windows(2) {
            missing.extend((pair[0] + 1..pair[1]).map(|n| (kind, n)));
        }
    }

    let mut plan = plan;
    plan.entries.extend(missing.into_iter().map(|(kind, n)| PlanEntry {
        kind,
        number: Some(n),
        source: PlanSource::Inferred,
        position: Position::Trailing,
    }));
    let numbered: Vec<usize> = (0..plan.entries.len())
        .filter(|&i| plan.entries[i].number.is_some())
        .collect();
    let items: Vec<(ObjectKind, u32)> = numbered
        .iter()
        .map(|&i| (plan.entries[i].kind, plan.entries[i].number.unwrap_or_default()))
        .collect();
    for (i, position) in numbered.into_iter().zip(assign_positions(&mentions, &items)) {
        plan.entries[i].position = position;
    }
    plan
}
