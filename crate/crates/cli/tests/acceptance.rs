//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! non-zero when any of them fails. Runs without the test harness so the
//! lines always appear in the output.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scia11y_core::compliance::{histogram, score, CheckStatus, Criterion, CriterionSet};
use scia11y_core::diagnostics::Diagnostics;
use scia11y_core::evaluation::{
    aggregate_errors, agreement_suite, cohens_kappa, icc, mean_difference, readability_by_field, PrimaryAnnotator,
};
use scia11y_core::fixtures::compliance::histogram_corpus;
use scia11y_core::fixtures::evaluation::{evaluation_corpus, FIRST_ANNOTATOR, SECOND_ANNOTATOR};
use scia11y_core::fixtures::{self, object, placement_example};
use scia11y_core::html::tokenizer::{tokenize, Token};
use scia11y_core::html::{emit_html, self_audit, AuditCriterion, EmitOptions};
use scia11y_core::model::{ExtractedDocument, FigureManifest, Handle, ObjectKind, SectionRef};
use scia11y_core::pipeline::{render_paper, RenderOptions};
use scia11y_core::stats::{anova_f, kruskal_wallis_h, pearson_r};
use scia11y_core::stitch::{
    insert_placeholders, merge, place_objects, MergeOptions, Position, RenderBlock, RenderTree,
};

use common::{code, golden_dir, golden_job, golden_names, scia11y, stderr, tree};

const PLACEHOLDER_SENTENCE: &str = "Not extracted; please refer to original document.";

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn main() {
    let checks: [(u32, &str, Check); 10] = [
        (1, "placement rule", c1_placement),
        (2, "placeholder rule", c2_placeholder),
        (3, "link bidirectionality", c3_links),
        (4, "emission audit", c4_audit),
        (5, "compliance scoring", c5_scoring),
        (6, "total-compliance histogram fixture", c6_histogram),
        (7, "statistics oracles", c7_stats),
        (8, "agreement suite", c8_agreement),
        (9, "evaluation table fixtures", c9_tables),
        (10, "batch determinism", c10_batch),
    ];
    let mut failed = Vec::new();
    for (n, name, check) in checks {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                println!("criterion {n:>2} FAIL  {name}: {detail}");
                failed.push(n);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

// ---- 1: placement ----

fn reading_order(doc: &ExtractedDocument) -> Vec<(SectionRef, usize, Vec<Handle>)> {
    let mut out = Vec::new();
    for (i, p) in doc.abstract_paragraphs.iter().enumerate() {
        out.push((
            SectionRef::Abstract,
            i,
            p.object_refs.iter().filter_map(|r| r.handle).collect(),
        ));
    }
    for (s, section) in doc.sections.iter().enumerate() {
        for (i, p) in section.paragraphs.iter().enumerate() {
            out.push((
                SectionRef::Body(s),
                i,
                p.object_refs.iter().filter_map(|r| r.handle).collect(),
            ));
        }
    }
    out
}

/// Brute force: a mentioned object goes after the first paragraph that
/// mentions it or any higher number of its kind. An unmentioned object goes
/// wherever the next lower existing number of its kind went.
fn oracle_position(order: &[(SectionRef, usize, Vec<Handle>)], numbers: &[u32], h: Handle) -> Position {
    let mentioned = order.iter().any(|(_, _, hs)| hs.contains(&h));
    if !mentioned {
        if let Some(lower) = numbers.iter().copied().filter(|&n| n < h.number).max() {
            return oracle_position(order, numbers, Handle::new(h.kind, lower));
        }
    }
    for (section, paragraph, hs) in order {
        if hs.iter().any(|m| m.kind == h.kind && m.number >= h.number) {
            return Position::After {
                section: *section,
                paragraph: *paragraph,
            };
        }
    }
    Position::Trailing
}

fn c1_placement() -> Result<String, String> {
    let (doc, figs) = placement_example();
    let (tree, _) = merge(&doc, &figs, &MergeOptions::default()).map_err(|e| e.to_string())?;
    let mut after: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    let mut last = None;
    for block in &tree.body {
        match block {
            RenderBlock::Paragraph(p) if p.section == SectionRef::Body(0) => last = Some(p.paragraph_index),
            RenderBlock::Object(o) => after
                .entry(last.ok_or("object before any paragraph")?)
                .or_default()
                .push(o.number.unwrap()),
            _ => {}
        }
    }
    let expected = BTreeMap::from([(0, vec![1, 2]), (1, vec![3])]);
    ensure(after == expected, format!("worked example placed {after:?}"))?;

    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut mismatches = 0;
    let mut checked = 0;
    for _ in 0..1000 {
        let (doc, figs) = fixtures::random_document(&mut rng, 8, 20);
        let order = reading_order(&doc);
        let plan = insert_placeholders(&doc, &figs, place_objects(&doc, &figs, &mut Diagnostics::new()));
        for e in &plan.entries {
            checked += 1;
            let expected = match e.number {
                Some(n) => {
                    let numbers: Vec<u32> = plan
                        .entries
                        .iter()
                        .filter(|o| o.kind == e.kind)
                        .filter_map(|o| o.number)
                        .collect();
                    oracle_position(&order, &numbers, Handle::new(e.kind, n))
                }
                None => Position::Trailing,
            };
            if e.position != expected {
                mismatches += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    ensure(mismatches == 0, format!("{mismatches} mismatches in {checked} objects"))?;
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!(
        "worked example exact; 1000 random documents, {checked} objects, 0 mismatches in {elapsed:.2?}"
    ))
}

// ---- 2: placeholders ----

fn placeholder_texts(doc: &ExtractedDocument, figs: &FigureManifest) -> Vec<String> {
    let (tree, _) = merge(doc, figs, &MergeOptions::default()).unwrap();
    tree.body
        .iter()
        .filter_map(|b| match b {
            RenderBlock::Placeholder(p) => Some(p.text.clone()),
            _ => None,
        })
        .collect()
}

fn c2_placeholder() -> Result<String, String> {
    let fig = |n| Handle::new(ObjectKind::Figure, n);
    let para = |mentions| {
        fixtures::paragraph(
            fixtures::ParagraphSpec {
                words: "Text.",
                mentions,
                citations: vec![],
            },
            &[],
        )
    };

    let mentioned = fixtures::document(
        "a",
        vec![fixtures::section(0, "S", Some("1"), vec![para(vec![fig(1), fig(2)])])],
        vec![],
    );
    let only_one = fixtures::manifest("a", vec![object(ObjectKind::Figure, 1)]);
    let gap_doc = fixtures::document(
        "a",
        vec![fixtures::section(0, "S", Some("1"), vec![para(vec![])])],
        vec![],
    );
    let gap = fixtures::manifest("a", vec![object(ObjectKind::Figure, 1), object(ObjectKind::Figure, 3)]);

    for (case, doc, figs) in [("mentioned", &mentioned, &only_one), ("interior gap", &gap_doc, &gap)] {
        let texts = placeholder_texts(doc, figs);
        ensure(texts.len() == 1, format!("{case}: {texts:?}"))?;
        let sentence = texts[0]
            .strip_prefix("Figure 2. ")
            .ok_or(format!("{case}: {}", texts[0]))?;
        ensure(sentence == PLACEHOLDER_SENTENCE, format!("{case}: {sentence:?}"))?;
        let (tree, _) = merge(doc, figs, &MergeOptions::default()).unwrap();
        let html = emit_html(&tree, &EmitOptions::default()).0.html;
        ensure(
            html.contains(&format!("Figure 2. {PLACEHOLDER_SENTENCE}")),
            format!("{case}: sentence missing from HTML"),
        )?;
    }
    Ok("mentioned-missing and interior-gap Figure 2 both carry the exact sentence".into())
}

// ---- 3: links ----

struct LinkCheck {
    citations: usize,
    problems: Vec<String>,
}

/// Walks the emitted markup: every in-page href must resolve, ids must be
/// unique, and each citation's bibliography entry must link back into the
/// citation's own section.
fn check_links(html: &str) -> LinkCheck {
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut hrefs = Vec::new();
    let mut section: Option<String> = None;
    let mut section_of: BTreeMap<String, Option<String>> = BTreeMap::new();
    let mut citations: Vec<(String, String)> = Vec::new();
    let mut returns: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut current_bib: Option<String> = None;
    for t in tokenize(html) {
        let Token::Start { name, attrs, .. } = t else { continue };
        if let Some(id) = attrs.get("id") {
            *ids.entry(id.clone()).or_default() += 1;
            section_of.insert(id.clone(), section.clone());
        }
        let is_heading = name.len() == 2 && name.starts_with('h') && name != "h1";
        if is_heading {
            section = attrs.get("id").cloned();
        }
        if name == "li" {
            current_bib = attrs.get("id").filter(|i| i.starts_with("bib-")).cloned();
        }
        if name != "a" {
            continue;
        }
        let Some(target) = attrs.get("href").and_then(|h| h.strip_prefix('#')) else {
            continue;
        };
        hrefs.push(target.to_string());
        if attrs.get("class").map(String::as_str) == Some("return-link") {
            if let Some(bib) = &current_bib {
                returns.entry(bib.clone()).or_default().push(target.to_string());
            }
        } else if target.starts_with("bib-") {
            if let Some(id) = attrs.get("id") {
                citations.push((id.clone(), target.to_string()));
            }
        }
    }
    let mut problems = Vec::new();
    for (id, n) in &ids {
        if *n > 1 {
            problems.push(format!("duplicate id {id}"));
        }
    }
    for h in &hrefs {
        if !ids.contains_key(h) {
            problems.push(format!("dangling #{h}"));
        }
    }
    for (cite, bib) in &citations {
        let home = section_of.get(cite).cloned().flatten();
        let back = returns.get(bib).map(Vec::as_slice).unwrap_or_default();
        if !back.iter().any(|r| section_of.get(r).cloned().flatten() == home) {
            problems.push(format!("{cite} has no return link into {home:?}"));
        }
    }
    LinkCheck {
        citations: citations.len(),
        problems,
    }
}

fn random_tree(rng: &mut ChaCha8Rng) -> RenderTree {
    let (doc, figs) = fixtures::random_document(rng, 8, 20);
    merge(&doc, &figs, &MergeOptions::default()).unwrap().0
}

fn c3_links() -> Result<String, String> {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut citations = 0;
    for i in 0..1000 {
        let tree = random_tree(&mut rng);
        for link in &tree.link_graph.citation_links {
            let back = tree
                .link_graph
                .return_links
                .get(&link.bib_key)
                .map(Vec::as_slice)
                .unwrap_or_default();
            ensure(
                back.iter().any(|r| r.section == link.section),
                format!("document {i}: {} lacks a return link", link.anchor),
            )?;
        }
        let check = check_links(&emit_html(&tree, &EmitOptions::default()).0.html);
        ensure(check.problems.is_empty(), format!("document {i}: {:?}", check.problems))?;
        citations += check.citations;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!(
        "1000 random documents, {citations} citations, all linked both ways, 0 dangling anchors in {elapsed:.2?}"
    ))
}

// ---- 4: audit ----

fn golden_html(name: &str) -> String {
    let dir = golden_dir();
    let fulltext = std::fs::read(dir.join("fulltext").join(format!("{name}.json"))).unwrap();
    let figures = std::fs::read(dir.join("figures").join(format!("{name}.json"))).ok();
    let opts = RenderOptions {
        emit: EmitOptions {
            asset_root: Some(dir.join("assets")),
            ..EmitOptions::default()
        },
        ..RenderOptions::default()
    };
    render_paper(&fulltext, figures.as_deref(), &opts).unwrap().html.html
}

fn remove_attr(html: &str, tag: &str, attr: &str) -> Option<String> {
    let start = html.find(tag)?;
    let at = start + html[start..].find(&format!(" {attr}=\""))?;
    let value_start = at + attr.len() + 3;
    let end = value_start + html[value_start..].find('"')? + 1;
    Some(format!("{}{}", &html[..at], &html[end..]))
}

/// Demotes the first level-2 heading inside the main content to level 4.
fn skip_heading_level(html: &str) -> Option<String> {
    let main = html.find("<main>")?;
    let open = main + html[main..].find("<h2")?;
    let close = open + html[open..].find("</h2>")?;
    Some(format!(
        "{}<h4{}</h4>{}",
        &html[..open],
        &html[open + 3..close],
        &html[close + 5..]
    ))
}

/// Strips the alternate text from the first image, or the caption and label
/// from the first placeholder.
fn untag_figure(html: &str) -> Option<String> {
    if let Some(mutant) = remove_attr(html, "<img", "alt") {
        return Some(mutant);
    }
    let with_label = remove_attr(html, "<figure", "aria-label")?;
    let open = with_label.find("<figcaption>")?;
    let close = open + with_label[open..].find("</figcaption>")? + "</figcaption>".len();
    Some(format!("{}{}", &with_label[..open], &with_label[close..]))
}

fn fails(html: &str, criterion: AuditCriterion) -> bool {
    self_audit(html).get(criterion).is_some_and(|c| !c.passed)
}

fn c4_audit() -> Result<String, String> {
    let mut renders: Vec<(String, String)> = golden_names()
        .into_iter()
        .map(|n| (n.clone(), golden_html(&n)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    for i in 0..500 {
        renders.push((
            format!("random-{i}"),
            emit_html(&random_tree(&mut rng), &EmitOptions::default()).0.html,
        ));
    }
    for (name, html) in &renders {
        let report = self_audit(html);
        ensure(report.passed, format!("{name}: {report:?}"))?;
    }

    let mut mutants = 0;
    for (name, html) in &renders {
        let lang = html.replacen("<html lang=\"en\">", "<html>", 1);
        ensure(
            lang != *html && fails(&lang, AuditCriterion::DefaultLanguage),
            format!("{name}: missing lang not detected"),
        )?;
        mutants += 1;
        if let Some(m) = skip_heading_level(html) {
            ensure(
                fails(&m, AuditCriterion::HeadingHierarchy),
                format!("{name}: skipped heading level not detected"),
            )?;
            mutants += 1;
        }
        if let Some(m) = untag_figure(html) {
            ensure(
                fails(&m, AuditCriterion::FiguresTagged),
                format!("{name}: untagged figure not detected"),
            )?;
            mutants += 1;
        }
    }
    Ok(format!(
        "{} renders pass every check; {mutants} mutants all caught",
        renders.len()
    ))
}

// ---- 5: scoring ----

fn c5_scoring() -> Result<String, String> {
    let three = CriterionSet::passing(&[Criterion::AltText, Criterion::TaggedPdf, Criterion::TabOrder]);
    let s = score(&three);
    ensure(
        s.total == 3 && s.normalized == 0.6 && !s.adobe5,
        format!("3 of 5 scored {s:?}"),
    )?;

    let statuses = [CheckStatus::Passed, CheckStatus::Failed, CheckStatus::NeedsManualCheck];
    let mut n = 0;
    for code in 0..243usize {
        let mut set = CriterionSet::passing(&[]);
        let mut passed = 0;
        let mut rest = code;
        for c in Criterion::ALL {
            let status = statuses[rest % 3];
            rest /= 3;
            passed += usize::from(status == CheckStatus::Passed);
            set.set(c, status);
        }
        let s = score(&set);
        ensure(
            usize::from(s.total) == passed,
            format!("assignment {code}: total {}", s.total),
        )?;
        ensure(
            s.adobe5 == (s.total == 5),
            format!("assignment {code}: adobe5 {}", s.adobe5),
        )?;
        n += 1;
    }
    Ok(format!(
        "3 of 5 gives total=3, normalized=0.6; adobe5 iff total=5 over all {n} assignments"
    ))
}

// ---- 6: histogram fixture ----

fn c6_histogram() -> Result<String, String> {
    let records = histogram_corpus();
    let h = histogram(&records);
    ensure(h[0] == 8519 && h[5] == 275, format!("histogram {h:?}"))?;
    let totals: Vec<u8> = records.iter().map(|r| score(&r.criteria).total).collect();
    let lang_only = records
        .iter()
        .zip(&totals)
        .filter(|(r, &t)| t == 1 && r.criteria.passed(Criterion::DefaultLanguage))
        .count();
    let missing_alt = records
        .iter()
        .zip(&totals)
        .filter(|(r, &t)| t == 4 && !r.criteria.passed(Criterion::AltText))
        .count();
    ensure(
        h[1] == 1010 && lang_only == 793,
        format!("total=1: {} with {lang_only} language-only", h[1]),
    )?;
    ensure(
        h[4] == 494 && missing_alt == 396,
        format!("total=4: {} with {missing_alt} missing alt text", h[4]),
    )?;
    let rate = 100.0 * records.iter().filter(|r| score(&r.criteria).adobe5).count() as f64 / records.len() as f64;
    ensure((rate - 2.4).abs() <= 0.05, format!("adobe-5 rate {rate:.3}%"))?;
    Ok(format!(
        "buckets {h:?} exact; 793 language-only, 396 missing alt text; adobe-5 rate {rate:.3}%"
    ))
}

// ---- 7: statistics ----

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn oracle_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn oracle_anova(groups: &[Vec<f64>]) -> f64 {
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let grand = all.iter().sum::<f64>() / all.len() as f64;
    let mut between = 0.0;
    let mut within = 0.0;
    for g in groups {
        let m = g.iter().sum::<f64>() / g.len() as f64;
        between += g.len() as f64 * (m - grand).powi(2);
        within += g.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    let k = groups.len() as f64;
    (between / (k - 1.0)) / (within / (all.len() as f64 - k))
}

/// H from rank sums, divided by the tie correction 1 − Σ(t³−t)/(N³−N).
fn oracle_kruskal(groups: &[Vec<f64>]) -> f64 {
    let mut all: Vec<f64> = groups.iter().flatten().copied().collect();
    all.sort_by(f64::total_cmp);
    let n = all.len() as f64;
    let mut rank_of: Vec<(f64, f64)> = Vec::new();
    let mut ties = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j] == all[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        rank_of.push((all[i], (i + j + 1) as f64 / 2.0));
        i = j;
    }
    let rank = |v: f64| rank_of.iter().find(|(x, _)| *x == v).unwrap().1;
    let sum: f64 = groups
        .iter()
        .map(|g| g.iter().map(|&v| rank(v)).sum::<f64>().powi(2) / g.len() as f64)
        .sum();
    let h = 12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0);
    h / (1.0 - ties / (n * n * n - n))
}

fn random_groups(rng: &mut ChaCha8Rng, integer: bool) -> Vec<Vec<f64>> {
    let k = rng.random_range(2..6);
    (0..k)
        .map(|g| {
            let n = rng.random_range(3..15);
            (0..n)
                .map(|_| {
                    if integer {
                        f64::from(rng.random_range(0..6u32))
                    } else {
                        rng.random_range(-5.0..5.0) + g as f64 * 0.3
                    }
                })
                .collect()
        })
        .collect()
}

fn c7_stats() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let mut worst: f64 = 0.0;
    let mut counts = [0usize; 3];
    for i in 0..200 {
        let n = rng.random_range(3..60);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| v * rng.random_range(-1.0..2.0) + rng.random_range(-3.0..3.0))
            .collect();
        let r = pearson_r(&x, &y).map_err(|e| e.to_string())?.value;
        let err = rel_err(r, oracle_pearson(&x, &y));
        ensure(err <= 1e-9, format!("pearson input {i}: relative error {err:e}"))?;
        worst = worst.max(err);
        let xa: Vec<f64> = x.iter().map(|v| 3.5 * v - 12.0).collect();
        let ya: Vec<f64> = y.iter().map(|v| 0.25 * v + 7.0).collect();
        let ra = pearson_r(&xa, &ya).map_err(|e| e.to_string())?.value;
        ensure((ra - r).abs() <= 1e-12, format!("pearson affine {i}: {ra} vs {r}"))?;
        counts[0] += 1;

        let groups = random_groups(&mut rng, i % 2 == 0);
        if groups
            .iter()
            .flatten()
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[0] == w[1])
        {
            continue;
        }
        let expected = oracle_anova(&groups);
        if expected.is_finite() {
            let f = anova_f(&groups).map_err(|e| e.to_string())?.value;
            let err = rel_err(f, expected);
            ensure(err <= 1e-9, format!("anova input {i}: relative error {err:e}"))?;
            worst = worst.max(err);
            let shifted: Vec<Vec<f64>> = groups
                .iter()
                .map(|g| g.iter().map(|v| 2.0 * v + 5.0).collect())
                .collect();
            let fa = anova_f(&shifted).map_err(|e| e.to_string())?.value;
            ensure(rel_err(fa, f) <= 1e-12, format!("anova affine {i}: {fa} vs {f}"))?;
            counts[1] += 1;
        }

        let h = kruskal_wallis_h(&groups).map_err(|e| e.to_string())?.value;
        let err = rel_err(h, oracle_kruskal(&groups));
        ensure(err <= 1e-9, format!("kruskal input {i}: relative error {err:e}"))?;
        worst = worst.max(err);
        let monotone: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| g.iter().map(|v| v.exp() + v.powi(3)).collect())
            .collect();
        let hm = kruskal_wallis_h(&monotone).map_err(|e| e.to_string())?.value;
        ensure(rel_err(hm, h) <= 1e-12, format!("kruskal monotone {i}: {hm} vs {h}"))?;
        counts[2] += 1;
    }
    ensure(counts.iter().all(|&c| c >= 100), format!("too few inputs {counts:?}"))?;
    Ok(format!(
        "pearson/anova/kruskal on {}/{}/{} inputs, worst relative error {worst:.1e}; invariances hold to 1e-12",
        counts[0], counts[1], counts[2]
    ))
}

// ---- 8: agreement ----

fn c8_agreement() -> Result<String, String> {
    let (records, _) = evaluation_corpus();
    let first: Vec<_> = records
        .iter()
        .filter(|r| r.annotator_id == FIRST_ANNOTATOR)
        .cloned()
        .collect();
    let second: Vec<_> = records
        .iter()
        .filter(|r| r.annotator_id == SECOND_ANNOTATOR)
        .cloned()
        .collect();
    let rows = agreement_suite(&first, &second).map_err(|e| e.to_string())?;
    let authors = rows.iter().find(|r| r.criterion == "Authors").ok_or("no Authors row")?;
    let kappa = authors.kappa.as_ref().ok_or("no kappa")?.value;
    ensure(
        authors.classes == Some(3) && authors.agreement.value == 1.0 && kappa == 1.0,
        format!("Authors row {authors:?}"),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    let a: Vec<usize> = (0..10_000).map(|_| rng.random_range(0..3)).collect();
    let b: Vec<usize> = (0..10_000).map(|_| rng.random_range(0..3)).collect();
    let independent = cohens_kappa(&a, &b, 3).map_err(|e| e.to_string())?.value;
    ensure(independent.abs() < 0.05, format!("independent kappa {independent}"))?;
    let same = cohens_kappa(&a, &a, 3).map_err(|e| e.to_string())?.value;
    ensure(same == 1.0, format!("identical kappa {same}"))?;

    let v: Vec<f64> = (0..50).map(|_| f64::from(rng.random_range(0..12u32))).collect();
    let icc_same = icc(&v, &v).map_err(|e| e.to_string())?.value;
    ensure((icc_same - 1.0).abs() <= 1e-12, format!("icc(a,a) = {icc_same}"))?;
    let md = mean_difference(&v, &v).map_err(|e| e.to_string())?;
    let shown = format!("{:.2} ± {:.2}", md.value, md.sd.unwrap_or(f64::NAN));
    ensure(shown == "0.00 ± 0.00", format!("mean difference {shown}"))?;
    Ok(format!(
        "Authors kappa 1.00; independent kappa {independent:.4}; icc(a,a)=1; mean difference {shown}"
    ))
}

// ---- 9: evaluation tables ----

/// Published element counts, in table order.
const ELEMENT_COUNTS: &[(&str, &[usize])] = &[
    ("Title", &[337, 16, 32]),
    ("Authors", &[307, 64, 14]),
    ("Abstract", &[308, 22, 55]),
    ("Figure extraction errors", &[6, 94, 201, 45, 39]),
    ("Figure caption errors", &[0, 94, 174, 55, 62]),
    ("Table extraction errors", &[2, 166, 165, 32, 20]),
    ("Table caption errors", &[2, 166, 190, 23, 4]),
    ("Header/Footer/Footnote errors", &[3, 170, 172, 40]),
    ("Section heading errors", &[2, 88, 258, 37]),
    ("Body paragraph errors", &[1, 226, 128, 30]),
    ("Bibliography extraction", &[7, 15, 313, 3, 47]),
    ("Inline citation linking", &[39, 10, 290, 20, 26]),
    ("Overall score", &[210, 122, 53]),
];

/// Published readability counts per field: papers, good, okay, bad.
const READABILITY_COUNTS: &[(&str, [usize; 4])] = &[
    ("Art", [13, 6, 1, 6]),
    ("Biology", [23, 12, 7, 4]),
    ("Business", [14, 6, 2, 6]),
    ("Chemistry", [19, 12, 5, 2]),
    ("Computer science", [21, 10, 7, 4]),
    ("Economics", [20, 6, 8, 6]),
    ("Engineering", [23, 15, 7, 1]),
    ("Environmental science", [18, 7, 8, 3]),
    ("Geography", [17, 9, 6, 2]),
    ("Geology", [21, 12, 8, 1]),
    ("History", [7, 5, 1, 1]),
    ("Materials science", [24, 15, 8, 1]),
    ("Mathematics", [25, 13, 8, 4]),
    ("Medicine", [26, 14, 12, 0]),
    ("Other", [8, 6, 2, 0]),
    ("Philosophy", [12, 7, 5, 0]),
    ("Physics", [39, 25, 10, 4]),
    ("Political science", [13, 6, 6, 1]),
    ("Psychology", [22, 11, 7, 4]),
    ("Sociology", [20, 13, 4, 3]),
];

fn c9_tables() -> Result<String, String> {
    let (records, fields) = evaluation_corpus();
    let errors = aggregate_errors(&records, PrimaryAnnotator::First).map_err(|e| e.to_string())?;
    ensure(errors.n_papers == 385, format!("{} papers", errors.n_papers))?;
    let mut cells = 0;
    for (element, expected) in ELEMENT_COUNTS {
        let row = errors.row(element).ok_or(format!("no row {element}"))?;
        ensure(
            row.counts == *expected,
            format!("{element}: {:?} != {expected:?}", row.counts),
        )?;
        cells += expected.len();
    }
    let readability = readability_by_field(&records, &fields, PrimaryAnnotator::First).map_err(|e| e.to_string())?;
    let all = &readability.all;
    ensure(
        [all.n, all.good, all.okay, all.bad] == [385, 210, 122, 53],
        format!("all papers {all:?}"),
    )?;
    for (field, expected) in READABILITY_COUNTS {
        let row = readability.field(field).ok_or(format!("no row {field}"))?;
        ensure(
            [row.n, row.good, row.okay, row.bad] == *expected,
            format!("{field}: {row:?}"),
        )?;
        cells += 4;
    }
    ensure(
        readability.fields.len() == READABILITY_COUNTS.len(),
        format!("{} field rows", readability.fields.len()),
    )?;
    Ok(format!(
        "{cells} cells equal the published tables (readability 210/122/53 of 385, Physics 39/25/10/4)"
    ))
}

// ---- 10: batch ----

fn run_batch(dir: &std::path::Path, extra: &[&str]) -> Result<(), String> {
    let manifest = dir.join("job.toml");
    let mut args = vec!["batch", manifest.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = scia11y(&args);
    ensure(
        code(&out) == 0,
        format!("batch {extra:?} exited {}: {}", code(&out), stderr(&out)),
    )
}

fn c10_batch() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    for (name, extra) in [("p1", vec!["--parallelism", "1"]), ("p8", vec!["--parallelism", "8"])] {
        let dir = tmp.path().join(name);
        golden_job(&dir, "");
        run_batch(&dir, &extra)?;
        trees.push(tree(&dir.join("out")));
    }
    let resumed = tmp.path().join("resumed");
    golden_job(&resumed, "");
    run_batch(&resumed, &["--parallelism", "8", "--limit", "4"])?;
    let partial = tree(&resumed.join("out"));
    let done_early = partial
        .keys()
        .filter(|k| k.starts_with("papers/") && k.ends_with(".html"))
        .count();
    ensure(
        done_early == 4,
        format!("interrupted run rendered {done_early} documents"),
    )?;
    run_batch(&resumed, &["--parallelism", "3"])?;
    trees.push(tree(&resumed.join("out")));

    let files = trees[0].len();
    ensure(
        trees[0]
            .keys()
            .filter(|k| k.ends_with(".html") && k.starts_with("papers/"))
            .count()
            == 10,
        "not all 10 documents rendered",
    )?;
    for (label, other) in [("parallelism 8", &trees[1]), ("interrupted and resumed", &trees[2])] {
        let keys: BTreeSet<&String> = trees[0].keys().chain(other.keys()).collect();
        let differing: Vec<&&String> = keys.iter().filter(|k| trees[0].get(**k) != other.get(**k)).collect();
        ensure(differing.is_empty(), format!("{label} differs in {differing:?}"))?;
    }
    Ok(format!(
        "{files} output files byte-identical at parallelism 1, 8 and after an interrupted run"
    ))
}
