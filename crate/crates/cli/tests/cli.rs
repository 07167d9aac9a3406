mod common;

use std::path::Path;

use scia11y_core::compliance::{Criterion, CriterionSet};
use scia11y_core::evaluation::{write_records_csv, write_records_dir, EvaluationRecord};
use scia11y_core::fixtures::compliance::{criterion_rates_corpus, histogram_corpus};
use scia11y_core::fixtures::evaluation::{evaluation_corpus, FIRST_ANNOTATOR, SECOND_ANNOTATOR};

use common::reports::{json_report, write_corpus};
use common::{assert_golden, code, data_dir, golden_dir, golden_job, scia11y, stderr, tree};

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn golden_input(sub: &str, name: &str) -> std::path::PathBuf {
    golden_dir().join(sub).join(format!("{name}.json"))
}

#[test]
fn render_writes_html_render_json_and_audit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = scia11y(&[
        "render",
        "--fulltext",
        p(&golden_input("fulltext", "01-placement")),
        "--figures",
        p(&golden_input("figures", "01-placement")),
        "--out",
        p(tmp.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let files: Vec<String> = tree(tmp.path()).into_keys().collect();
    assert_eq!(files.len(), 3, "{files:?}");
    assert!(files.iter().any(|f| f.ends_with(".html")));
    assert!(files.iter().any(|f| f.ends_with(".render.json")));
    let audit_file = files.iter().find(|f| f.ends_with(".audit.json")).unwrap();
    let audit: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join(audit_file)).unwrap()).unwrap();
    assert_eq!(audit["passed"], true);
}

#[test]
fn render_without_manifest_warns_and_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = scia11y(&[
        "render",
        "--fulltext",
        p(&golden_input("fulltext", "01-placement")),
        "--figures",
        p(&tmp.path().join("absent.json")),
        "--out",
        p(tmp.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("figure_manifest_missing"), "{}", stderr(&out));
}

#[test]
fn malformed_input_exits_2_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "{ \"paper_id\": ").unwrap();
    let out_dir = tmp.path().join("out");
    let out = scia11y(&["render", "--fulltext", p(&bad), "--out", p(&out_dir)]);
    assert_eq!(code(&out), 2);
    assert!(!out_dir.exists() || tree(&out_dir).is_empty());
}

#[test]
fn self_audit_flags_a_mutated_render() {
    let tmp = tempfile::tempdir().unwrap();
    let out = scia11y(&[
        "render",
        "--fulltext",
        p(&golden_input("fulltext", "08-citations")),
        "--out",
        p(tmp.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let html_path = String::from_utf8(out.stdout).unwrap().trim().to_string();
    assert_eq!(code(&scia11y(&["self-audit", &html_path])), 0);

    let mutant = tmp.path().join("mutant.html");
    let html = std::fs::read_to_string(&html_path)
        .unwrap()
        .replacen("<html lang=\"en\"", "<html", 1);
    std::fs::write(&mutant, html).unwrap();
    assert_eq!(code(&scia11y(&["self-audit", p(&mutant)])), 3);
}

#[test]
fn batch_renders_golden_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = golden_job(tmp.path(), "");
    let out = scia11y(&["batch", p(&manifest)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["done"], 10);
    assert_eq!(summary["failed"], 0);
    let files = tree(&tmp.path().join("out"));
    assert!(files.contains_key("index.html"));
    assert!(files.contains_key("assets/g10-fig1.png"));
    assert_eq!(
        files
            .keys()
            .filter(|k| k.ends_with(".html") && k.starts_with("papers/"))
            .count(),
        10
    );
    assert_eq!(stderr(&out).lines().filter(|l| l.contains("\"document\"")).count(), 10);
}

#[test]
fn batch_continue_on_error_records_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = golden_job(tmp.path(), "continue_on_error = true\n");
    std::fs::write(tmp.path().join("fulltext/05-deep-sections.json"), "not json").unwrap();
    let out = scia11y(&["batch", p(&manifest)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["done"], 9);
    assert_eq!(summary["failed"], 1);
    assert_eq!(summary["failures"][0]["document"], "05-deep-sections");

    // Fixing the input and rerunning retries only the failed document.
    std::fs::copy(
        golden_input("fulltext", "05-deep-sections"),
        tmp.path().join("fulltext/05-deep-sections.json"),
    )
    .unwrap();
    let out = scia11y(&["batch", p(&manifest)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stderr(&out).lines().filter(|l| l.contains("\"document\"")).count(), 1);
}

#[test]
fn batch_without_continue_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = golden_job(tmp.path(), "");
    std::fs::write(tmp.path().join("fulltext/01-placement.json"), "[]").unwrap();
    assert_eq!(code(&scia11y(&["batch", p(&manifest)])), 1);
}

#[test]
fn batch_flags_override_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = golden_job(tmp.path(), "parallelism = 1\n");
    let elsewhere = tmp.path().join("elsewhere");
    let out = scia11y(&["batch", p(&manifest), "--output", p(&elsewhere), "--parallelism", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(elsewhere.join("summary.json").is_file());
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn batch_bad_manifest_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = tmp.path().join("job.toml");
    std::fs::write(&manifest, "schema_version = 1\nfulltext_dir = 3\n").unwrap();
    assert_eq!(code(&scia11y(&["batch", p(&manifest)])), 2);
}

#[test]
fn audit_histogram_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let metadata = write_corpus(tmp.path(), &histogram_corpus());
    let out_dir = tmp.path().join("out");
    let out = scia11y(&[
        "audit",
        "--reports",
        p(&tmp.path().join("reports")),
        "--metadata",
        p(&metadata),
        "--out",
        p(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let histogram = std::fs::read_to_string(out_dir.join("histogram.csv")).unwrap();
    assert_eq!(histogram, "total,count\n0,8519\n1,1010\n2,741\n3,358\n4,494\n5,275\n");
    let software = std::fs::read_to_string(out_dir.join("software.csv")).unwrap();
    assert!(software.contains("Microsoft Word,1318,11.6"), "{software}");

    let stats_dir = tmp.path().join("stats");
    let out = scia11y(&[
        "stats",
        "--records",
        p(&out_dir.join("records.json")),
        "--out",
        p(&stats_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let stats: serde_json::Value =
        serde_json::from_slice(&std::fs::read(stats_dir.join("stats.json")).unwrap()).unwrap();
    assert!(stats.is_object());
}

#[test]
fn audit_criterion_rates_table() {
    let tmp = tempfile::tempdir().unwrap();
    write_corpus(tmp.path(), &criterion_rates_corpus());
    let out_dir = tmp.path().join("out");
    let out = scia11y(&[
        "audit",
        "--reports",
        p(&tmp.path().join("reports")),
        "--out",
        p(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = std::fs::read_to_string(out_dir.join("criteria.csv")).unwrap();
    for row in [
        "Alt-text,130,4.0",
        "Table headers,32,1.0",
        "Tagged PDF,240,7.4",
        "Default language,97,3.0",
    ] {
        assert!(table.contains(row), "{row} missing from {table}");
    }
}

#[test]
fn audit_empty_or_unreadable_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let reports = tmp.path().join("reports");
    std::fs::create_dir_all(&reports).unwrap();
    assert_eq!(
        code(&scia11y(&[
            "audit",
            "--reports",
            p(&reports),
            "--out",
            p(&tmp.path().join("o1"))
        ])),
        2
    );

    std::fs::write(
        reports.join("a.json"),
        json_report("a", &CriterionSet::passing(&[Criterion::AltText])),
    )
    .unwrap();
    std::fs::write(
        reports.join("b.json"),
        "{\"schema_version\":1,\"status\":\"unreadable\"}",
    )
    .unwrap();
    std::fs::write(reports.join("c.json"), "garbage").unwrap();
    let out_dir = tmp.path().join("o2");
    let out = scia11y(&["audit", "--reports", p(&reports), "--out", p(&out_dir)]);
    assert_eq!(code(&out), 2);
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["unreadable"].as_array().unwrap().len(), 2);
}

fn write_csv(path: &Path, records: &[EvaluationRecord]) {
    write_records_csv(std::fs::File::create(path).unwrap(), records).unwrap();
}

#[test]
fn evaluate_fixture_matches_golden() {
    let (records, fields) = evaluation_corpus();
    let tmp = tempfile::tempdir().unwrap();
    let csv_path = tmp.path().join("records.csv");
    write_csv(&csv_path, &records);
    let fields_path = tmp.path().join("fields.csv");
    let mut fields_csv = String::from("paper_id,field_of_study\n");
    for (id, field) in &fields {
        fields_csv.push_str(&format!("{id},{field}\n"));
    }
    std::fs::write(&fields_path, fields_csv).unwrap();

    let out_dir = tmp.path().join("out");
    let out = scia11y(&[
        "evaluate",
        "--records",
        p(&csv_path),
        "--fields",
        p(&fields_path),
        "--out",
        p(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let expected = data_dir().join("expected");
    assert_golden(
        &expected.join("errors.csv"),
        &std::fs::read_to_string(out_dir.join("errors.csv")).unwrap(),
    );
    assert_golden(
        &expected.join("readability.csv"),
        &std::fs::read_to_string(out_dir.join("readability.csv")).unwrap(),
    );

    // The directory layout gives the same tables.
    let dir = tmp.path().join("records");
    write_records_dir(&dir, &records).unwrap();
    let out_dir2 = tmp.path().join("out2");
    let out = scia11y(&[
        "evaluate",
        "--records",
        p(&dir),
        "--fields",
        p(&fields_path),
        "--out",
        p(&out_dir2),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        std::fs::read(out_dir.join("errors.csv")).unwrap(),
        std::fs::read(out_dir2.join("errors.csv")).unwrap()
    );
}

#[test]
fn evaluate_lists_every_invalid_record() {
    let (records, _) = evaluation_corpus();
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("records");
    write_records_dir(&dir, &records[..5]).unwrap();
    let bad_a = dir.join("bad-a");
    std::fs::create_dir_all(&bad_a).unwrap();
    std::fs::write(bad_a.join("x.json"), "{\"schema_version\":1,\"paper_id\":\"bad-a\"}").unwrap();
    let mut broken = records[0].clone();
    broken.paper_id = "bad-b".into();
    broken.figures_present = Some(1);
    broken.figures_correct = Some(4);
    write_records_dir(&dir, &[broken]).unwrap();

    let out = scia11y(&["evaluate", "--records", p(&dir), "--out", p(&tmp.path().join("out"))]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("bad-a"), "{err}");
    assert!(err.contains("bad-b"), "{err}");
    assert!(!tmp.path().join("out/errors.csv").exists());
}

#[test]
fn agreement_between_annotators() {
    let (records, _) = evaluation_corpus();
    let tmp = tempfile::tempdir().unwrap();
    let first: Vec<EvaluationRecord> = records
        .iter()
        .filter(|r| r.annotator_id == FIRST_ANNOTATOR)
        .cloned()
        .collect();
    let a = tmp.path().join("a.csv");
    write_csv(&a, &first);
    let out = scia11y(&["agreement", p(&a), p(&a)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.starts_with("criterion,classes,n,agreement,kappa,icc,mean_difference\n"));
    assert!(
        table
            .lines()
            .any(|l| l.starts_with("Title,3,") && l.contains(",1.00,1.00,")),
        "{table}"
    );
    assert!(
        table
            .lines()
            .any(|l| l.starts_with("Number of figures,") && l.contains(",1.00,0.00 ± 0.00")),
        "{table}"
    );

    let second: Vec<EvaluationRecord> = records
        .iter()
        .filter(|r| r.annotator_id == SECOND_ANNOTATOR && !first.iter().any(|f| f.paper_id == r.paper_id))
        .cloned()
        .collect();
    let b = tmp.path().join("b.csv");
    write_csv(&b, &second);
    assert_eq!(code(&scia11y(&["agreement", p(&a), p(&b)])), 2);
}
