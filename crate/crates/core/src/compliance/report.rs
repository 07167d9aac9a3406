use serde::{Deserialize, Serialize};

use super::{CheckStatus, Criterion, CriterionSet};
use crate::error::ReportError;
use crate::html::tokenizer::{tokenize, Token};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Normalized JSON report, one per PDF.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedReport {
    pub schema_version: u32,
    #[serde(default)]
    pub paper_id: Option<String>,
    #[serde(default = "ok_status")]
    pub status: ReportStatus,
    #[serde(default)]
    pub rules: Vec<RuleOutcome>,
}

fn ok_status() -> ReportStatus {
    ReportStatus::Ok
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Ok,
    /// The checker could not open the PDF (password protected or corrupt).
    Unreadable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleOutcome {
    pub name: String,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedReport {
    pub paper_id: Option<String>,
    pub criteria: CriterionSet,
}

fn normalize_label(s: &str) -> String {
    s.to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Tracked criterion for a checker rule name. Only exact (normalized) names
/// match, so neighbouring rules such as "Other elements alternate text" or
/// "Tagged content" are ignored.
pub fn rule_criterion(name: &str) -> Option<Criterion> {
    match normalize_label(name).as_str() {
        "figures alternate text" | "alt text" | "alttext" | "alternate text" | "figures alt text" => {
            Some(Criterion::AltText)
        }
        "headers" | "table headers" | "tableheaders" => Some(Criterion::TableHeaders),
        "tagged pdf" | "taggedpdf" => Some(Criterion::TaggedPdf),
        "primary language" | "default language" | "defaultlanguage" => Some(Criterion::DefaultLanguage),
        "tab order" | "taborder" => Some(Criterion::TabOrder),
        _ => None,
    }
}

/// Status word as printed by the checker. "Skipped" is treated as a manual
/// check, never as a pass.
pub fn rule_status(s: &str) -> Option<CheckStatus> {
    match normalize_label(s).as_str() {
        "passed" | "pass" | "passed manually" => Some(CheckStatus::Passed),
        "failed" | "fail" | "failed manually" => Some(CheckStatus::Failed),
        "needs manual check" | "manual check" | "skipped" => Some(CheckStatus::NeedsManualCheck),
        _ => None,
    }
}

const UNREADABLE_MARKERS: &[&str] = &[
    "password protected",
    "password-protected",
    "file is corrupt",
    "file is damaged",
    "could not be opened",
    "cannot be opened",
];

/// Reads the five tracked criteria from a checker report, either the
/// normalized JSON format or checker HTML with one rule per table row.
pub fn parse_report(raw: &[u8]) -> Result<ParsedReport, ReportError> {
    let text = String::from_utf8_lossy(raw);
    let trimmed = text.trim_start_matches('\u{feff}').trim_start();
    if trimmed.is_empty() {
        return Err(ReportError::ReportUnreadable("empty report".into()));
    }
    let (paper_id, outcomes) = if trimmed.starts_with('{') {
        let report: NormalizedReport = serde_json::from_str(trimmed)
            .map_err(|e| ReportError::ReportUnreadable(format!("invalid JSON report: {e}")))?;
        if report.schema_version > REPORT_SCHEMA_VERSION {
            return Err(ReportError::ReportUnreadable(format!(
                "unsupported report schema_version {}",
                report.schema_version
            )));
        }
        if report.status == ReportStatus::Unreadable {
            return Err(ReportError::ReportUnreadable("checker could not open the PDF".into()));
        }
        let outcomes = report
            .rules
            .iter()
            .map(|r| (r.name.clone(), r.status.clone()))
            .collect();
        (report.paper_id, outcomes)
    } else {
        let lower = trimmed.to_lowercase();
        if let Some(marker) = UNREADABLE_MARKERS.iter().find(|m| lower.contains(*m)) {
            return Err(ReportError::ReportUnreadable(format!("report says {marker:?}")));
        }
        (None, html_rows(trimmed))
    };

    let mut found: [Option<CheckStatus>; 5] = [None; 5];
    for (name, status) in outcomes {
        let (Some(criterion), Some(status)) = (rule_criterion(&name), rule_status(&status)) else {
            continue;
        };
        let slot = &mut found[criterion.index()];
        if slot.is_none() {
            *slot = Some(status);
        }
    }
    let missing: Vec<&str> = Criterion::ALL
        .iter()
        .filter(|c| found[c.index()].is_none())
        .map(|c| c.label())
        .collect();
    if !missing.is_empty() {
        return Err(ReportError::ReportUnreadable(format!(
            "missing criteria: {}",
            missing.join(", ")
        )));
    }
    let mut criteria = CriterionSet::default();
    for c in Criterion::ALL {
        criteria.set(c, found[c.index()].unwrap_or(CheckStatus::Failed));
    }
    Ok(ParsedReport { paper_id, criteria })
}

/// (rule name, status) pairs from table rows: the first cell naming a
/// tracked rule and the first cell holding a status word.
fn html_rows(html: &str) -> Vec<(String, String)> {
    let mut rows = Vec::new();
    let mut cells: Vec<String> = Vec::new();
    let mut in_cell = false;
    for token in tokenize(html) {
        match token {
            Token::Start { name, .. } if name == "tr" => cells.clear(),
            Token::Start { name, .. } if name == "td" || name == "th" => {
                in_cell = true;
                cells.push(String::new());
            }
            Token::End(name) if name == "td" || name == "th" => in_cell = false,
            Token::Text(t) if in_cell => {
                if let Some(c) = cells.last_mut() {
                    c.push_str(&t);
                }
            }
            Token::End(name) if name == "tr" => {
                let rule = cells.iter().find(|c| rule_criterion(c).is_some());
                let status = cells.iter().find(|c| rule_status(c).is_some());
                if let (Some(rule), Some(status)) = (rule, status) {
                    rows.push((rule.trim().to_string(), status.trim().to_string()));
                }
                cells.clear();
                in_cell = false;
            }
            _ => {}
        }
    }
    rows
}
