//! HTML emission from a [`RenderTree`](crate::stitch::RenderTree), and an
//! audit of the produced markup.

mod audit;
mod emit;
pub mod tokenizer;

pub use audit::{self_audit, AuditCriterion, AuditReport, CriterionResult};
pub use emit::{emit_html, escape_attr, escape_text, EmitOptions, HtmlRender};
