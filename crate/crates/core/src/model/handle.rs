use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    Figure,
    Table,
}

impl ObjectKind {
    pub fn label(self) -> &'static str {
        match self {
            ObjectKind::Figure => "Figure",
            ObjectKind::Table => "Table",
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            ObjectKind::Figure => "figure",
            ObjectKind::Table => "table",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "figure" | "fig" | "fig." => Some(ObjectKind::Figure),
            "table" | "tab" | "tab." => Some(ObjectKind::Table),
            _ => None,
        }
    }
}

/// Normalized reference to a numbered figure or table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Handle {
    pub kind: ObjectKind,
    pub number: u32,
}

impl Handle {
    pub fn new(kind: ObjectKind, number: u32) -> Self {
        Self { kind, number }
    }
}

impl fmt::Display for Handle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.label(), self.number)
    }
}

static HANDLE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^\s*(figure|fig\.?|table|tab\.?)\s*(\d+)[a-z]?\s*$").unwrap());

static HANDLE_SCAN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(figures?|figs?\.?|tables?|tabs?\.?)\s*(\d+)").unwrap());

/// Recognizes "Figure 3", "fig. 3", "TABLE 4", "Tab 2". A trailing subpanel
/// letter ("Fig. 1a") is accepted and dropped. Appendix-style numbers
/// ("Figure A2", "Table S1") are unparseable.
pub fn normalize_handle(raw: &str) -> Option<Handle> {
    let caps = HANDLE.captures(raw)?;
    let kind = ObjectKind::parse(&caps[1])?;
    let number = caps[2].parse().ok()?;
    Some(Handle { kind, number })
}

/// Finds handle mentions in free text. Offsets are in characters.
pub fn scan_handles(text: &str) -> Vec<(usize, usize, Handle)> {
    HANDLE_SCAN
        .captures_iter(text)
        .filter_map(|caps| {
            let whole = caps.get(0)?;
            let word = caps[1].trim_end_matches('.').to_ascii_lowercase();
            let kind = if word.starts_with("fig") {
                ObjectKind::Figure
            } else {
                ObjectKind::Table
            };
            let number = caps[2].parse().ok()?;
            let start = text[..whole.start()].chars().count();
            let end = start + whole.as_str().chars().count();
            Some((start, end, Handle { kind, number }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn recognizes_abbreviated_figure() {
        assert_eq!(normalize_handle("Fig. 1"), Some(Handle::new(ObjectKind::Figure, 1)));
    }

    #[test]
    fn case_insensitive_table() {
        assert_eq!(normalize_handle("TABLE 4"), Some(Handle::new(ObjectKind::Table, 4)));
        assert_eq!(normalize_handle("tab. 2"), Some(Handle::new(ObjectKind::Table, 2)));
    }

    #[test]
    fn appendix_numbers_are_unparseable() {
        assert_eq!(normalize_handle("Figure A2"), None);
        assert_eq!(normalize_handle("Table S1"), None);
        assert_eq!(normalize_handle("Section 3"), None);
        assert_eq!(normalize_handle(""), None);
    }

    #[test]
    fn subpanel_letter_dropped() {
        assert_eq!(normalize_handle("Fig. 3b"), Some(Handle::new(ObjectKind::Figure, 3)));
    }

    #[test]
    fn scan_finds_plain_mentions_with_char_offsets() {
        let text = "Résumé: see Fig. 2 and Table 1, also figures 3.";
        let found = scan_handles(text);
        let handles: Vec<_> = found.iter().map(|(_, _, h)| h.to_string()).collect();
        assert_eq!(handles, ["Figure 2", "Table 1", "Figure 3"]);
        let (s, e, _) = found[0];
        let chars: Vec<char> = text.chars().collect();
        assert_eq!(chars[s..e].iter().collect::<String>(), "Fig. 2");
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent_on_rendering(n in 0u32..100_000, table in any::<bool>()) {
            let kind = if table { ObjectKind::Table } else { ObjectKind::Figure };
            let h = Handle::new(kind, n);
            prop_assert_eq!(normalize_handle(&h.to_string()), Some(h));
        }
    }
}
