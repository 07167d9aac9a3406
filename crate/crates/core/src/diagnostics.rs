//! Structured warnings collected while parsing, stitching and emitting.
//!
//! Each warning serializes to one JSON object so callers can stream them as
//! JSON lines.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningCode {
    InvalidUtf8,
    SpanOutOfBounds,
    OverlappingSpan,
    UnresolvedCitation,
    UnparseableHandle,
    InvalidNumbering,
    DuplicateObject,
    ImagePathWithoutExtraction,
    DuplicateBibKey,
    MentionBeforeFirstSection,
    FigureManifestMissing,
    AssetMissing,
    PaperIdOverride,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub code: WarningCode,
    pub message: String,
}

/// Append-only list of warnings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub warnings: Vec<Warning>,
}

impl Diagnostics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn warn(&mut self, code: WarningCode, message: impl Into<String>) {
        self.warnings.push(Warning {
            code,
            message: message.into(),
        });
    }

    pub fn count(&self, code: WarningCode) -> usize {
        self.warnings.iter().filter(|w| w.code == code).count()
    }

    pub fn len(&self) -> usize {
        self.warnings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn extend(&mut self, other: Diagnostics) {
        self.warnings.extend(other.warnings);
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for w in &self.warnings {
            out.push_str(&serde_json::to_string(w).expect("warning serializes"));
            out.push('\n');
        }
        out
    }
}
