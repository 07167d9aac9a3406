//! Stable anchor ids: `sec-<index>`, `bib-<key>`, `cite-<key>-<section>-<n>`,
//! `obj-<kind>-<number>`.
//!
//! Keys are escaped so that distinct keys never collide: ASCII alphanumerics
//! and `-` pass through, everything else (including `_`) becomes `_xx` hex.

use crate::model::{ObjectKind, SectionRef};

pub const TITLE: &str = "title";
pub const AUTHORS: &str = "authors";
pub const ABSTRACT: &str = "abstract";
pub const TOC: &str = "toc";
pub const REFERENCES: &str = "references";
pub const BANNER: &str = "about";

pub fn token(key: &str) -> String {
    let mut out = String::with_capacity(key.len());
    for b in key.bytes() {
        if b.is_ascii_alphanumeric() || b == b'-' {
            out.push(b as char);
        } else {
            out.push_str(&format!("_{b:02x}"));
        }
    }
    out
}

pub fn section(section: SectionRef) -> String {
    match section {
        SectionRef::Abstract => ABSTRACT.to_string(),
        SectionRef::Body(i) => format!("sec-{i}"),
    }
}

pub fn bib(key: &str) -> String {
    format!("bib-{}", token(key))
}

pub fn citation(key: &str, section: SectionRef, ordinal: usize) -> String {
    format!("cite-{}-{}-{ordinal}", token(key), section.slug())
}

pub fn object(kind: ObjectKind, number: u32) -> String {
    format!("obj-{}-{number}", kind.slug())
}

/// Unnumbered objects are counted per kind from 1 in manifest order.
pub fn unnumbered_object(kind: ObjectKind, ordinal: usize) -> String {
    format!("obj-{}-u{ordinal}", kind.slug())
}

pub fn equation(ordinal: usize) -> String {
    format!("eq-{ordinal}")
}
