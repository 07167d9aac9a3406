use serde::{Deserialize, Serialize};

use super::{PlaceholderKind, RenderBlock, RenderTree};
use crate::model::{ObjectKind, SectionRef};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TocTree {
    /// Objects placed before the first body section (e.g. in the abstract).
    pub front_matter: Vec<TocObject>,
    pub entries: Vec<TocEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TocEntry {
    pub anchor: String,
    pub heading_text: String,
    pub depth: usize,
    pub children: Vec<TocObject>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TocObject {
    pub anchor: String,
    pub label: String,
}

fn object_label(kind: ObjectKind, number: Option<u32>) -> String {
    match number {
        Some(n) => format!("{} {n}", kind.label()),
        None => format!("{} (unnumbered)", kind.label()),
    }
}

/// One entry per body section in order; figures, tables and their
/// placeholders nest under the section they were placed in.
pub fn build_toc(tree: &RenderTree) -> TocTree {
    let mut toc = TocTree::default();
    for block in &tree.body {
        let child = match block {
            RenderBlock::Heading(h) => {
                if let SectionRef::Body(_) = h.section {
                    toc.entries.push(TocEntry {
                        anchor: h.anchor.clone(),
                        heading_text: h.text.clone(),
                        depth: h.depth,
                        children: Vec::new(),
                    });
                }
                continue;
            }
            RenderBlock::Paragraph(_) => continue,
            RenderBlock::Object(o) => TocObject {
                anchor: o.anchor.clone(),
                label: object_label(o.kind, o.number),
            },
            RenderBlock::Placeholder(p) => {
                let kind = match p.kind {
                    PlaceholderKind::Figure => ObjectKind::Figure,
                    PlaceholderKind::Table => ObjectKind::Table,
                    PlaceholderKind::Equation => continue,
                };
                TocObject {
                    anchor: p.anchor.clone(),
                    label: object_label(kind, p.number),
                }
            }
        };
        match toc.entries.last_mut() {
            Some(entry) => entry.children.push(child),
            None => toc.front_matter.push(child),
        }
    }
    toc
}
