#![allow(dead_code)]

pub mod reports;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

pub fn golden_dir() -> PathBuf {
    data_dir().join("golden")
}

/// Golden document names, from the full-text inputs.
pub fn golden_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(golden_dir().join("fulltext"))
        .unwrap()
        .map(|e| e.unwrap().path().file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

pub fn scia11y(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scia11y"))
        .args(args)
        .env_remove("SCIA11Y_OUTPUT_DIR")
        .env_remove("SCIA11Y_PARALLELISM")
        .env_remove("SCIA11Y_CONTINUE_ON_ERROR")
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Copies the golden inputs into `dir` and writes a job manifest there.
pub fn golden_job(dir: &Path, extra: &str) -> PathBuf {
    for sub in ["fulltext", "figures", "assets"] {
        let to = dir.join(sub);
        std::fs::create_dir_all(&to).unwrap();
        for e in std::fs::read_dir(golden_dir().join(sub)).unwrap() {
            let p = e.unwrap().path();
            std::fs::copy(&p, to.join(p.file_name().unwrap())).unwrap();
        }
    }
    let manifest = dir.join("job.toml");
    std::fs::write(
        &manifest,
        format!(
            "schema_version = 1\nfulltext_dir = \"fulltext\"\nfigures_dir = \"figures\"\n\
             assets_dir = \"assets\"\noutput_dir = \"out\"\n{extra}"
        ),
    )
    .unwrap();
    manifest
}

/// Every file below `root` with its contents, keyed by relative path.
pub fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Compares against a stored golden file, or rewrites it when
/// `SCIA11Y_UPDATE_GOLDEN` is set.
pub fn assert_golden(path: &Path, actual: &str) {
    if std::env::var_os("SCIA11Y_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{}: {e} (set SCIA11Y_UPDATE_GOLDEN=1 to create)", path.display()));
    assert!(
        expected == actual,
        "{} differs from the rendered output",
        path.display()
    );
}
