//! A small HTML tokenizer, enough to audit documents produced by the emitter
//! and hand-edited variants of them. It does not build a tree and does not
//! implement the HTML5 error-recovery rules.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Doctype(String),
    Start {
        name: String,
        attrs: BTreeMap<String, String>,
        self_closing: bool,
    },
    End(String),
    Text(String),
    Comment(String),
}

/// Elements that never have content or an end tag.
pub const VOID_ELEMENTS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "source", "track", "wbr",
];

const RAW_TEXT_ELEMENTS: &[&str] = &["script", "style"];

pub fn is_void(name: &str) -> bool {
    VOID_ELEMENTS.contains(&name)
}

pub fn tokenize(input: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut rest = input;
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix("<!--") {
            let end = after.find("-->").unwrap_or(after.len());
            tokens.push(Token::Comment(after[..end].to_string()));
            rest = after.get(end + 3..).unwrap_or("");
        } else if rest.starts_with("<!") {
            let end = rest.find('>').unwrap_or(rest.len());
            tokens.push(Token::Doctype(rest[2..end].trim().to_string()));
            rest = rest.get(end + 1..).unwrap_or("");
        } else if let Some(after) = rest.strip_prefix("</") {
            let end = after.find('>').unwrap_or(after.len());
            tokens.push(Token::End(after[..end].trim().to_ascii_lowercase()));
            rest = after.get(end + 1..).unwrap_or("");
        } else if rest.starts_with('<') && rest[1..].starts_with(|c: char| c.is_ascii_alphabetic()) {
            let (token, consumed) = start_tag(rest);
            rest = &rest[consumed..];
            if let Token::Start { name, .. } = &token {
                if RAW_TEXT_ELEMENTS.contains(&name.as_str()) {
                    let close = format!("</{name}");
                    let end = find_ascii_ci(rest, &close).unwrap_or(rest.len());
                    let name = name.clone();
                    tokens.push(token);
                    if end > 0 {
                        tokens.push(Token::Text(rest[..end].to_string()));
                    }
                    rest = &rest[end..];
                    if !rest.is_empty() {
                        let gt = rest.find('>').unwrap_or(rest.len());
                        rest = rest.get(gt + 1..).unwrap_or("");
                        tokens.push(Token::End(name));
                    }
                    continue;
                }
            }
            tokens.push(token);
        } else {
            let first = rest.chars().next().map_or(1, char::len_utf8);
            let end = rest[first..].find('<').map_or(rest.len(), |i| i + first);
            tokens.push(Token::Text(decode_entities(&rest[..end])));
            rest = &rest[end..];
        }
    }
    tokens
}

fn find_ascii_ci(haystack: &str, needle: &str) -> Option<usize> {
    let h = haystack.as_bytes();
    let n = needle.as_bytes();
    (0..=h.len().checked_sub(n.len())?).find(|&i| h[i..i + n.len()].eq_ignore_ascii_case(n))
}

/// Parses a start tag at the beginning of `input`; returns the token and
/// the number of bytes consumed.
fn start_tag(input: &str) -> (Token, usize) {
    let bytes = input.as_bytes();
    let mut i = 1;
    while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'>' && bytes[i] != b'/' {
        i += 1;
    }
    let name = input[1..i].to_ascii_lowercase();
    let mut attrs = BTreeMap::new();
    let mut self_closing = false;
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            break;
        }
        match bytes[i] {
            b'>' => {
                i += 1;
                break;
            }
            b'/' => {
                self_closing = true;
                i += 1;
                continue;
            }
            _ => {}
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !b"=>/".contains(&bytes[i]) {
            i += 1;
        }
        let key = input[start..i].to_ascii_lowercase();
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let mut value = String::new();
        if i < bytes.len() && bytes[i] == b'=' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'"' || bytes[i] == b'\'') {
                let quote = bytes[i];
                let vstart = i + 1;
                let vend = input[vstart..]
                    .bytes()
                    .position(|b| b == quote)
                    .map_or(input.len(), |p| vstart + p);
                value = decode_entities(&input[vstart..vend]);
                i = (vend + 1).min(input.len());
            } else {
                let vstart = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'>' {
                    i += 1;
                }
                value = decode_entities(&input[vstart..i]);
            }
        }
        if !key.is_empty() {
            attrs.entry(key).or_insert(value);
        }
    }
    (
        Token::Start {
            name,
            attrs,
            self_closing,
        },
        i,
    )
}

/// Decodes the character references the emitter produces plus numeric ones.
/// Unknown references are kept verbatim.
pub fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let Some(semi) = rest[..rest.len().min(12)].find(';') else {
            out.push('&');
            rest = &rest[1..];
            continue;
        };
        let name = &rest[1..semi];
        let decoded = match name {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            "nbsp" => Some('\u{a0}'),
            _ => name
                .strip_prefix("#x")
                .or_else(|| name.strip_prefix("#X"))
                .and_then(|h| u32::from_str_radix(h, 16).ok())
                .or_else(|| name.strip_prefix('#').and_then(|d| d.parse().ok()))
                .and_then(char::from_u32),
        };
        match decoded {
            Some(c) => {
                out.push(c);
                rest = &rest[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}
