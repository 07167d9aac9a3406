use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use base64::Engine as _;
use serde::{Deserialize, Serialize};

use crate::anchors;
use crate::diagnostics::{Diagnostics, WarningCode};
use crate::model::ObjectKind;
use crate::stitch::{
    placeholder_text, InlineTarget, ObjectBlock, ParagraphBlock, PlaceholderBlock, RenderBlock, RenderTree, TocEntry,
    TocObject,
};

const STYLESHEET: &str = "body{max-width:42em;margin:0 auto;padding:1em;font:1.125rem/1.6 Georgia,serif}\
figure{margin:1.5em 0}img{max-width:100%;height:auto}\
.placeholder{border:1px dashed #777;padding:.5em}\
#about{border-bottom:1px solid #ccc;font-size:.9em}";

#[derive(Debug, Clone)]
pub struct EmitOptions {
    /// Overrides the language recorded in the render tree.
    pub lang: Option<String>,
    /// Prefix joined to each object's image path in `src` attributes.
    pub assets_prefix: String,
    /// Embed images as base64 data URIs instead of referencing them.
    pub inline_images: bool,
    /// Directory image paths are resolved against. When set, each image
    /// must be a readable file or the object is rendered as a placeholder.
    pub asset_root: Option<PathBuf>,
}

impl Default for EmitOptions {
    fn default() -> Self {
        Self {
            lang: None,
            assets_prefix: "assets/".to_string(),
            inline_images: false,
            asset_root: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HtmlRender {
    pub html: String,
    /// Element name for every `id` in the document.
    pub anchor_index: BTreeMap<String, String>,
}

pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn escape_attr(s: &str) -> String {
    escape_text(s).replace('"', "&quot;")
}

struct Writer {
    out: String,
    anchors: BTreeMap<String, String>,
}

impl Writer {
    fn line(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }

    /// Records an id and returns the attribute text for it.
    fn id(&mut self, id: &str, element: &str) -> String {
        let previous = self.anchors.insert(id.to_string(), element.to_string());
        debug_assert!(previous.is_none(), "duplicate id {id}");
        format!(" id=\"{}\"", escape_attr(id))
    }
}

/// Serializes a render tree to a standalone HTML document. Missing image
/// files (when an asset root is given) downgrade the object to a
/// placeholder with an `asset_missing` warning.
pub fn emit_html(tree: &RenderTree, opts: &EmitOptions) -> (HtmlRender, Diagnostics) {
    let mut diag = Diagnostics::new();
    let mut w = Writer {
        out: String::new(),
        anchors: BTreeMap::new(),
    };
    let lang = opts.lang.as_deref().unwrap_or(&tree.metadata.lang);
    let lang = if lang.trim().is_empty() { "en" } else { lang.trim() };
    let title = if tree.metadata.title.trim().is_empty() {
        "Untitled document"
    } else {
        tree.metadata.title.trim()
    };

    w.line("<!DOCTYPE html>");
    w.line(&format!("<html lang=\"{}\">", escape_attr(lang)));
    w.line("<head>");
    w.line("<meta charset=\"utf-8\">");
    w.line("<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">");
    w.line(&format!("<title>{}</title>", escape_text(title)));
    w.line(&format!("<style>{STYLESHEET}</style>"));
    w.line("</head>");
    w.line("<body>");

    let about = w.id(anchors::BANNER, "aside");
    w.line(&format!("<aside{about} aria-label=\"About this document\">"));
    w.line(&format!(
        "<p>This is an automatically generated HTML version of paper {}. Extraction may contain errors; please refer to the original document when in doubt.</p>",
        escape_text(&tree.metadata.paper_id)
    ));
    w.line("</aside>");

    w.line("<header>");
    let title_id = w.id(anchors::TITLE, "h1");
    w.line(&format!("<h1{title_id}>{}</h1>", escape_text(title)));
    let authors_id = w.id(anchors::AUTHORS, "section");
    w.line(&format!("<section{authors_id} aria-label=\"Authors\">"));
    w.line("<h2>Authors</h2>");
    if tree.metadata.authors.is_empty() {
        w.line("<ul><li>Authors not extracted</li></ul>");
    } else {
        w.line("<ul>");
        for a in &tree.metadata.authors {
            w.line(&format!("<li>{}</li>", escape_text(a)));
        }
        w.line("</ul>");
    }
    w.line("</section>");
    w.line("</header>");

    w.line("<main>");
    let first_body_heading = tree
        .body
        .iter()
        .position(|b| matches!(b, RenderBlock::Heading(h) if h.anchor != anchors::ABSTRACT));
    let (front, rest) = tree.body.split_at(first_body_heading.unwrap_or(tree.body.len()));
    let mut open_section = false;
    for block in front {
        emit_block(&mut w, block, opts, &mut diag, &mut open_section);
    }
    close_section(&mut w, &mut open_section);
    emit_toc(&mut w, tree);
    for block in rest {
        emit_block(&mut w, block, opts, &mut diag, &mut open_section);
    }
    close_section(&mut w, &mut open_section);
    emit_references(&mut w, tree);
    w.line("</main>");
    w.line("</body>");
    w.line("</html>");

    (
        HtmlRender {
            html: w.out,
            anchor_index: w.anchors,
        },
        diag,
    )
}

fn close_section(w: &mut Writer, open: &mut bool) {
    if *open {
        w.line("</section>");
        *open = false;
    }
}

fn emit_block(
    w: &mut Writer,
    block: &RenderBlock,
    opts: &EmitOptions,
    diag: &mut Diagnostics,
    open_section: &mut bool,
) {
    match block {
        RenderBlock::Heading(h) => {
            close_section(w, open_section);
            let level = (h.depth + 1).clamp(2, 6);
            let tag = format!("h{level}");
            let id = w.id(&h.anchor, &tag);
            w.line("<section>");
            *open_section = true;
            w.line(&format!("<{tag}{id}>{}</{tag}>", escape_text(&h.text)));
        }
        RenderBlock::Paragraph(p) => emit_paragraph(w, p),
        RenderBlock::Object(o) => match image_source(o, opts) {
            Ok(src) => {
                let label = object_label(o.kind, o.number);
                let id = w.id(&o.anchor, "figure");
                w.line(&format!("<figure{id}>"));
                w.line(&format!(
                    "<img src=\"{}\" alt=\"{}\">",
                    escape_attr(&src),
                    escape_attr(&label)
                ));
                w.line(&format!("<figcaption>{}</figcaption>", escape_text(&o.caption)));
                w.line("</figure>");
            }
            Err(message) => {
                diag.warn(WarningCode::AssetMissing, message);
                let kind = o.kind.into();
                emit_placeholder(
                    w,
                    &PlaceholderBlock {
                        anchor: o.anchor.clone(),
                        kind,
                        number: o.number,
                        text: placeholder_text(kind, o.number),
                        caption: Some(o.caption.clone()).filter(|c| !c.trim().is_empty()),
                    },
                );
            }
        },
        RenderBlock::Placeholder(p) => emit_placeholder(w, p),
    }
}

fn object_label(kind: ObjectKind, number: Option<u32>) -> String {
    match number {
        Some(n) => format!("{} {n}", kind.label()),
        None => kind.label().to_string(),
    }
}

fn emit_placeholder(w: &mut Writer, p: &PlaceholderBlock) {
    let id = w.id(&p.anchor, "figure");
    w.line(&format!(
        "<figure{id} class=\"placeholder\" aria-label=\"{}\">",
        escape_attr(&p.text)
    ));
    match &p.caption {
        Some(c) => w.line(&format!(
            "<figcaption>{} {}</figcaption>",
            escape_text(&p.text),
            escape_text(c)
        )),
        None => w.line(&format!("<figcaption>{}</figcaption>", escape_text(&p.text))),
    }
    w.line("</figure>");
}

fn image_source(o: &ObjectBlock, opts: &EmitOptions) -> Result<String, String> {
    let resolved: Option<PathBuf> = opts.asset_root.as_ref().map(|root| root.join(&o.image_path));
    if let Some(path) = &resolved {
        if !path.is_file() {
            return Err(format!("{}: image {} is not readable", o.anchor, o.image_path));
        }
    }
    if opts.inline_images {
        let path = resolved.unwrap_or_else(|| PathBuf::from(&o.image_path));
        let bytes = std::fs::read(&path).map_err(|e| format!("{}: image {}: {e}", o.anchor, o.image_path))?;
        let encoded = base64::engine::general_purpose::STANDARD.encode(bytes);
        return Ok(format!("data:{};base64,{encoded}", mime_type(&path)));
    }
    let prefix = &opts.assets_prefix;
    if prefix.is_empty() || prefix.ends_with('/') {
        Ok(format!("{prefix}{}", o.image_path))
    } else {
        Ok(format!("{prefix}/{}", o.image_path))
    }
}

fn mime_type(path: &Path) -> &'static str {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("png") => "image/png",
        Some("jpg" | "jpeg") => "image/jpeg",
        Some("gif") => "image/gif",
        Some("svg") => "image/svg+xml",
        Some("webp") => "image/webp",
        _ => "application/octet-stream",
    }
}

fn emit_paragraph(w: &mut Writer, p: &ParagraphBlock) {
    let chars: Vec<char> = p.text.chars().collect();
    let slice = |a: usize, b: usize| -> String { chars[a.min(chars.len())..b.min(chars.len())].iter().collect() };
    let mut out = String::from("<p>");
    let mut cursor = 0;
    for link in &p.links {
        if link.start < cursor || link.end > chars.len() || link.start >= link.end {
            continue;
        }
        out.push_str(&escape_text(&slice(cursor, link.start)));
        let text = escape_text(&slice(link.start, link.end));
        match &link.target {
            InlineTarget::Citation { anchor, bib_key } => {
                let id = w.id(anchor, "a");
                let _ = write!(
                    out,
                    "<a{id} href=\"#{}\">{text}</a>",
                    escape_attr(&anchors::bib(bib_key))
                );
            }
            InlineTarget::Object { target } => {
                let _ = write!(out, "<a href=\"#{}\">{text}</a>", escape_attr(target));
            }
        }
        cursor = link.end;
    }
    out.push_str(&escape_text(&slice(cursor, chars.len())));
    out.push_str("</p>");
    w.line(&out);
}

fn toc_objects(w: &mut Writer, objects: &[TocObject]) {
    for o in objects {
        w.line(&format!(
            "<li><a href=\"#{}\">{}</a></li>",
            escape_attr(&o.anchor),
            escape_text(&o.label)
        ));
    }
}

fn emit_toc(w: &mut Writer, tree: &RenderTree) {
    let id = w.id(anchors::TOC, "nav");
    w.line(&format!("<nav{id} aria-label=\"Table of Contents\">"));
    w.line("<h2>Table of Contents</h2>");
    let has_abstract = tree
        .body
        .iter()
        .any(|b| matches!(b, RenderBlock::Heading(h) if h.anchor == anchors::ABSTRACT));
    let has_references = !tree.bibliography.is_empty();
    if has_abstract || !tree.toc.entries.is_empty() || has_references {
        w.line("<ol>");
        if has_abstract {
            w.line(&format!("<li><a href=\"#{}\">Abstract</a>", anchors::ABSTRACT));
            if !tree.toc.front_matter.is_empty() {
                w.line("<ol>");
                toc_objects(w, &tree.toc.front_matter);
                w.line("</ol>");
            }
            w.line("</li>");
        }
        toc_entries(w, &tree.toc.entries);
        if has_references {
            w.line(&format!("<li><a href=\"#{}\">References</a></li>", anchors::REFERENCES));
        }
        w.line("</ol>");
    }
    w.line("</nav>");
}

/// Nested list from a flat, depth-annotated entry list. Each entry's objects
/// come before its subsections.
fn toc_entries(w: &mut Writer, entries: &[TocEntry]) {
    let mut i = 0;
    while i < entries.len() {
        let depth = entries[i].depth;
        let e = &entries[i];
        w.line(&format!(
            "<li><a href=\"#{}\">{}</a>",
            escape_attr(&e.anchor),
            escape_text(&e.heading_text)
        ));
        let end = entries[i + 1..]
            .iter()
            .position(|x| x.depth <= depth)
            .map_or(entries.len(), |p| i + 1 + p);
        if !e.children.is_empty() || end > i + 1 {
            w.line("<ol>");
            toc_objects(w, &e.children);
            toc_entries(w, &entries[i + 1..end]);
            w.line("</ol>");
        }
        w.line("</li>");
        i = end;
    }
}

fn emit_references(w: &mut Writer, tree: &RenderTree) {
    if tree.bibliography.is_empty() {
        return;
    }
    w.line("<section>");
    let id = w.id(anchors::REFERENCES, "h2");
    w.line(&format!("<h2{id}>References</h2>"));
    w.line("<ul>");
    for (i, entry) in tree.bibliography.iter().enumerate() {
        let id = w.id(&anchors::bib(&entry.key), "li");
        let mut line = format!("<li{id}>[{}] {}", i + 1, escape_text(entry.raw_text.trim()));
        if let Some(url) = &entry.url {
            let _ = write!(line, " <a href=\"{}\">{}</a>", escape_attr(url), escape_text(url));
        }
        if let Some(links) = tree.link_graph.return_links.get(&entry.key) {
            for l in links {
                let _ = write!(
                    line,
                    " <a class=\"return-link\" href=\"#{}\" aria-label=\"Return to citation in {}\">{}</a>",
                    escape_attr(&l.anchor),
                    escape_attr(&l.label),
                    escape_text(&l.label)
                );
            }
        }
        line.push_str("</li>");
        w.line(&line);
    }
    w.line("</ul>");
    w.line("</section>");
}
