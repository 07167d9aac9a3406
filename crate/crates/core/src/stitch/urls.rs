//! Bibliography URL recovery: entries often lose their URL field, and URLs
//! in the raw reference string are broken by line-wrap hyphenation.

use std::sync::LazyLock;

use regex::Regex;
use url::Url;

use crate::model::BibEntry;

static URL_START: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(https?://|\bdoi:\s*10\.\d{4,9}/|\b10\.\d{4,9}/)").unwrap());

const TRAILING_PUNCT: &[char] = &['.', ',', ';', ':', '"', '\'', '>', '}'];

/// Returns the entry with a validated absolute URL, or with `url = None`
/// when nothing usable can be recovered. A valid URL is left untouched.
pub fn repair_urls(entry: &BibEntry) -> BibEntry {
    let mut out = entry.clone();
    out.url = repaired_url(entry);
    out
}

fn repaired_url(entry: &BibEntry) -> Option<String> {
    if let Some(existing) = entry.url.as_deref() {
        if validate(existing).is_some() {
            return Some(existing.to_string());
        }
        if let Some(fixed) = candidates(existing).into_iter().find_map(|c| validate(&c)) {
            return Some(fixed);
        }
    }
    candidates(&entry.raw_text).into_iter().find_map(|c| validate(&c))
}

/// Absolute http(s) URL with a host, normalized by the URL parser only when
/// the input already parses.
fn validate(candidate: &str) -> Option<String> {
    let parsed = Url::parse(candidate).ok()?;
    let host = parsed.host_str()?;
    let ok = matches!(parsed.scheme(), "http" | "https") && host.contains('.');
    ok.then(|| candidate.to_string())
}

/// URL-like substrings of `text` with hyphenated line breaks healed.
fn candidates(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut search_from = 0;
    while let Some(m) = URL_START.find_at(text, search_from) {
        let (raw, consumed) = take_url(&text[m.start()..]);
        search_from = m.start() + consumed.max(1);
        let cleaned = strip_trailing(&raw);
        if cleaned.is_empty() {
            continue;
        }
        let lower = cleaned.to_ascii_lowercase();
        let url = if lower.starts_with("http") {
            cleaned
        } else {
            let doi = cleaned
                .trim_start_matches(|c: char| c.is_ascii_alphabetic())
                .trim_start_matches(':')
                .trim_start();
            format!("https://doi.org/{doi}")
        };
        out.push(url);
    }
    out
}

/// Reads a URL token, joining across "-<whitespace>" breaks. Returns the
/// healed token and the number of bytes consumed.
fn take_url(s: &str) -> (String, usize) {
    let mut out = String::new();
    let mut chars = s.char_indices().peekable();
    let mut consumed = 0;
    // A "doi: 10.x" prefix may contain a space after the colon.
    if s.len() >= 4 && s[..4].eq_ignore_ascii_case("doi:") {
        out.push_str(&s[..4]);
        while let Some(&(i, c)) = chars.peek() {
            if i < 4 {
                chars.next();
                continue;
            }
            if c.is_whitespace() {
                chars.next();
            } else {
                break;
            }
        }
    }
    while let Some((i, c)) = chars.next() {
        if c.is_whitespace() {
            break;
        }
        if c == '-' {
            let rest = &s[i + 1..];
            let ws = rest.len() - rest.trim_start().len();
            if ws > 0 {
                let after = &rest[ws..];
                if after.chars().next().is_some_and(|n| !n.is_whitespace()) {
                    // Hyphenated wrap: drop the hyphen and the whitespace.
                    while chars.peek().is_some_and(|&(j, _)| j < i + 1 + ws) {
                        chars.next();
                    }
                    consumed = i + 1 + ws;
                    continue;
                }
            }
        }
        out.push(c);
        consumed = i + c.len_utf8();
    }
    (out, consumed)
}

fn strip_trailing(raw: &str) -> String {
    let mut s = raw.to_string();
    loop {
        let before = s.len();
        s = s.trim_end_matches(TRAILING_PUNCT).to_string();
        for (open, close) in [('(', ')'), ('[', ']')] {
            if s.ends_with(close) && s.matches(open).count() < s.matches(close).count() {
                s.pop();
            }
        }
        if s.len() == before {
            return s;
        }
    }
}
