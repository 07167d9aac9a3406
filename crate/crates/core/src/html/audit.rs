use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::tokenizer::{is_void, tokenize, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditCriterion {
    /// Root element declares a language.
    DefaultLanguage,
    /// Exactly one level-1 heading.
    SingleTitle,
    /// Heading levels never increase by more than one.
    HeadingHierarchy,
    /// Figures carry a caption, images carry alternate text, placeholders
    /// carry an accessible label.
    FiguresTagged,
    /// Every table has header cells.
    TableHeaders,
    /// No positive tabindex, and table of contents targets appear in
    /// document order.
    ReadingOrder,
    /// Every in-page link resolves, ids are unique.
    AnchorTotality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub criterion: AuditCriterion,
    pub passed: bool,
    /// Offending ids or short descriptions of the offending elements.
    pub offending: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl AuditReport {
    pub fn get(&self, criterion: AuditCriterion) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.criterion == criterion)
    }
}

struct Element {
    name: String,
    attrs: BTreeMap<String, String>,
    /// Index of this element's start token.
    start: usize,
}

impl Element {
    fn describe(&self) -> String {
        match self.attrs.get("id") {
            Some(id) => format!("{}#{id}", self.name),
            None => format!("{}@{}", self.name, self.start),
        }
    }
}

#[derive(Default)]
struct Findings {
    lang: Option<String>,
    saw_html: bool,
    h1: Vec<String>,
    heading_problems: Vec<String>,
    figure_problems: Vec<String>,
    table_problems: Vec<String>,
    order_problems: Vec<String>,
    anchor_problems: Vec<String>,
}

/// Checks a rendered document against the accessibility criteria the
/// emitter is meant to guarantee.
pub fn self_audit(html: &str) -> AuditReport {
    let tokens = tokenize(html);
    let mut f = Findings::default();
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut hrefs: Vec<(usize, String)> = Vec::new();
    let mut toc_hrefs: Vec<String> = Vec::new();
    let mut stack: Vec<Element> = Vec::new();
    let mut last_level = 0u32;

    // Per open figure: (has img, has figcaption).
    let mut figure_state: Vec<(bool, bool)> = Vec::new();
    // Per open table: has th.
    let mut table_state: Vec<bool> = Vec::new();

    for (idx, token) in tokens.iter().enumerate() {
        match token {
            Token::Start {
                name,
                attrs,
                self_closing,
            } => {
                if let Some(id) = attrs.get("id") {
                    if ids.insert(id.clone(), idx).is_some() {
                        f.anchor_problems.push(format!("duplicate id {id}"));
                    }
                }
                if let Some(href) = attrs.get("href") {
                    if let Some(target) = href.strip_prefix('#') {
                        hrefs.push((idx, target.to_string()));
                        if stack
                            .iter()
                            .any(|e| e.name == "nav" && e.attrs.get("id").map(String::as_str) == Some("toc"))
                        {
                            toc_hrefs.push(target.to_string());
                        }
                    }
                }
                if let Some(t) = attrs.get("tabindex") {
                    if t.trim().parse::<i64>().is_ok_and(|v| v > 0) {
                        f.order_problems.push(format!("{name} has tabindex {t}"));
                    }
                }
                let element = Element {
                    name: name.clone(),
                    attrs: attrs.clone(),
                    start: idx,
                };
                match name.as_str() {
                    "html" => {
                        f.saw_html = true;
                        f.lang = attrs.get("lang").cloned();
                    }
                    "h1" | "h2" | "h3" | "h4" | "h5" | "h6" => {
                        let level = u32::from(name.as_bytes()[1] - b'0');
                        if level == 1 {
                            f.h1.push(element.describe());
                        }
                        if level > last_level + 1 {
                            f.heading_problems
                                .push(format!("{} follows h{last_level}", element.describe()));
                        }
                        last_level = level;
                    }
                    "img" => {
                        let alt = attrs.get("alt").map(|a| a.trim().to_string());
                        if alt.is_none_or(|a| a.is_empty()) {
                            f.figure_problems
                                .push(format!("{} has no alternate text", element.describe()));
                        }
                        if let Some(state) = figure_state.last_mut() {
                            state.0 = true;
                        }
                    }
                    "figcaption" => {
                        if let Some(state) = figure_state.last_mut() {
                            state.1 = true;
                        }
                    }
                    "figure" => figure_state.push((false, false)),
                    "table" => table_state.push(false),
                    "th" => {
                        if let Some(state) = table_state.last_mut() {
                            *state = true;
                        }
                    }
                    _ => {}
                }
                if !is_void(name) && !self_closing {
                    stack.push(element);
                }
            }
            Token::End(name) => {
                let Some(pos) = stack.iter().rposition(|e| &e.name == name) else {
                    continue;
                };
                for element in stack.drain(pos..).rev() {
                    match element.name.as_str() {
                        "figure" => {
                            let (img, caption) = figure_state.pop().unwrap_or((true, true));
                            if !caption {
                                f.figure_problems.push(format!("{} has no caption", element.describe()));
                            }
                            let label = element.attrs.get("aria-label").map(|l| l.trim());
                            if !img && label.is_none_or(str::is_empty) {
                                f.figure_problems.push(format!(
                                    "{} has neither an image nor an accessible label",
                                    element.describe()
                                ));
                            }
                        }
                        "table" if !table_state.pop().unwrap_or(true) => {
                            f.table_problems
                                .push(format!("{} has no header cells", element.describe()));
                        }
                        _ => {}
                    }
                }
            }
            _ => {}
        }
    }

    for (_, target) in &hrefs {
        if !ids.contains_key(target) {
            f.anchor_problems.push(format!("dangling link #{target}"));
        }
    }
    let positions: Vec<(String, usize)> = toc_hrefs
        .iter()
        .filter_map(|t| ids.get(t).map(|&p| (t.clone(), p)))
        .collect();
    for pair in positions.windows(2) {
        if pair[1].1 < pair[0].1 {
            f.order_problems
                .push(format!("#{} appears before #{}", pair[1].0, pair[0].0));
        }
    }

    let lang_problem: Vec<String> = match (&f.lang, f.saw_html) {
        (Some(l), _) if !l.trim().is_empty() => vec![],
        (_, true) => vec!["html element has no lang attribute".into()],
        (_, false) => vec!["no html element".into()],
    };
    let title_problem = if f.h1.len() == 1 {
        vec![]
    } else if f.h1.is_empty() {
        vec!["no h1 element".into()]
    } else {
        f.h1.clone()
    };

    let criteria = vec![
        result(AuditCriterion::DefaultLanguage, lang_problem),
        result(AuditCriterion::SingleTitle, title_problem),
        result(AuditCriterion::HeadingHierarchy, f.heading_problems),
        result(AuditCriterion::FiguresTagged, f.figure_problems),
        result(AuditCriterion::TableHeaders, f.table_problems),
        result(AuditCriterion::ReadingOrder, f.order_problems),
        result(AuditCriterion::AnchorTotality, dedup(f.anchor_problems)),
    ];
    AuditReport {
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

fn dedup(v: Vec<String>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    v.into_iter().filter(|s| seen.insert(s.clone())).collect()
}

fn result(criterion: AuditCriterion, offending: Vec<String>) -> CriterionResult {
    CriterionResult {
        criterion,
        passed: offending.is_empty(),
        offending,
    }
}
