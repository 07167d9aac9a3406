//! One paper end to end: parse both extraction outputs, stitch, emit HTML and
//! audit the result.

use crate::diagnostics::{Diagnostics, WarningCode};
use crate::error::RenderError;
use crate::html::{emit_html, self_audit, AuditReport, EmitOptions, HtmlRender};
use crate::model::{parse_extraction, parse_figures, FigureManifest};
use crate::stitch::{merge, MergeOptions, RenderTree};

#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    pub merge: MergeOptions,
    pub emit: EmitOptions,
}

#[derive(Debug, Clone)]
pub struct RenderOutput {
    pub tree: RenderTree,
    pub html: HtmlRender,
    pub audit: AuditReport,
    pub diagnostics: Diagnostics,
}

/// Renders one paper. Without a figure manifest every mentioned figure and
/// table becomes a placeholder and a `figure_manifest_missing` warning is
/// recorded.
pub fn render_paper(
    fulltext: &[u8],
    figures: Option<&[u8]>,
    opts: &RenderOptions,
) -> Result<RenderOutput, RenderError> {
    let (doc, mut diagnostics) = parse_extraction(fulltext).map_err(RenderError::FullText)?;
    let manifest = match figures {
        Some(raw) => {
            let (manifest, diag) = parse_figures(raw).map_err(RenderError::Figures)?;
            diagnostics.extend(diag);
            manifest
        }
        None => {
            diagnostics.warn(
                WarningCode::FigureManifestMissing,
                format!(
                    "no figure manifest for {}; objects render as placeholders",
                    doc.paper_id
                ),
            );
            FigureManifest::empty(doc.paper_id.clone())
        }
    };
    let (tree, diag) = merge(&doc, &manifest, &opts.merge)?;
    diagnostics.extend(diag);
    let (html, diag) = emit_html(&tree, &opts.emit);
    diagnostics.extend(diag);
    let audit = self_audit(&html.html);
    Ok(RenderOutput {
        tree,
        html,
        audit,
        diagnostics,
    })
}
