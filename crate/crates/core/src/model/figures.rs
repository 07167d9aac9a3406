//! Figure/table manifest reader.
//!
//! ```json
//! { "schema_version": 1, "paper_id": "...",
//!   "objects": [ { "kind": "figure", "number": 1, "caption": "...",
//!                  "image_path": "fig1.png", "extracted": true } ] }
//! ```
//!
//! DeepFigures-style keys (`figures`, `figure_type`, `name`, `caption_text`,
//! `renderURL`) are accepted as aliases.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ObjectKind;
use crate::diagnostics::{Diagnostics, WarningCode};
use crate::error::ParseError;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FigureManifest {
    pub schema_version: u32,
    pub paper_id: String,
    pub objects: Vec<ExtractedObject>,
}

impl FigureManifest {
    pub fn empty(paper_id: impl Into<String>) -> Self {
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            paper_id: paper_id.into(),
            objects: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedObject {
    pub kind: ObjectKind,
    /// `None` for objects whose caption carries no number.
    pub number: Option<u32>,
    pub caption: String,
    pub image_path: Option<String>,
    pub extracted: bool,
}

#[derive(Deserialize)]
struct RawManifest {
    #[serde(default)]
    schema_version: Option<u32>,
    #[serde(default)]
    paper_id: Option<Value>,
    #[serde(default, alias = "figures")]
    objects: Vec<RawObject>,
}

#[derive(Deserialize)]
struct RawObject {
    #[serde(alias = "figure_type")]
    kind: String,
    #[serde(default, alias = "name")]
    number: Option<Value>,
    #[serde(default, alias = "caption_text")]
    caption: Option<String>,
    #[serde(default, alias = "renderURL")]
    image_path: Option<String>,
    #[serde(default)]
    extracted: Option<bool>,
}

pub fn parse_figures(raw: &[u8]) -> Result<(FigureManifest, Diagnostics), ParseError> {
    let mut diag = Diagnostics::new();
    let text = String::from_utf8_lossy(raw);
    let manifest: RawManifest = serde_json::from_str(&text).map_err(|e| ParseError::MalformedInput(e.to_string()))?;
    let schema_version = manifest.schema_version.unwrap_or(MANIFEST_SCHEMA_VERSION);
    if schema_version > MANIFEST_SCHEMA_VERSION {
        return Err(ParseError::MalformedInput(format!(
            "unsupported manifest schema_version {schema_version}"
        )));
    }
    let paper_id = match manifest.paper_id {
        Some(Value::String(s)) => s,
        Some(Value::Number(n)) => n.to_string(),
        _ => String::new(),
    };

    let mut seen = BTreeSet::new();
    let mut objects = Vec::with_capacity(manifest.objects.len());
    for raw in manifest.objects {
        let kind = ObjectKind::parse(&raw.kind)
            .ok_or_else(|| ParseError::MalformedInput(format!("unknown object kind {:?}", raw.kind)))?;
        let number = match raw.number {
            Some(Value::Number(n)) => n.as_u64().and_then(|n| u32::try_from(n).ok()),
            Some(Value::String(s)) => s.trim().parse().ok(),
            _ => None,
        };
        if let Some(n) = number {
            if !seen.insert((kind, n)) {
                diag.warn(
                    WarningCode::DuplicateObject,
                    format!("duplicate {} {n} dropped", kind.label()),
                );
                continue;
            }
        }
        let mut image_path = raw.image_path.filter(|p| !p.trim().is_empty());
        let extracted = raw.extracted.unwrap_or(image_path.is_some());
        if !extracted && image_path.is_some() {
            diag.warn(
                WarningCode::ImagePathWithoutExtraction,
                format!("{} {number:?} is not extracted; image path ignored", kind.label()),
            );
            image_path = None;
        }
        objects.push(ExtractedObject {
            kind,
            number,
            caption: raw.caption.unwrap_or_default().trim().to_string(),
            image_path,
            extracted,
        });
    }

    Ok((
        FigureManifest {
            schema_version,
            paper_id,
            objects,
        },
        diag,
    ))
}
