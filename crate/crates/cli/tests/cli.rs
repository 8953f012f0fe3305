use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(side: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures/toy")
        .join(side)
}

fn remap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_remap"))
        .args(args)
        .env_remove("REMAP_CONFIG_DIR")
        .output()
        .expect("spawn remap")
}

fn ok(args: &[&str]) {
    let out = remap(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn error_of(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("error line");
    serde_json::from_str(line).unwrap_or_else(|_| panic!("not json: {stderr}"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn copy_tree(from: &Path, to: &Path) {
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let dest = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            fs::create_dir_all(&dest).unwrap();
            copy_tree(&entry.path(), &dest);
        } else {
            fs::copy(entry.path(), dest).unwrap();
        }
    }
}

/// Extracts both fixture trees and writes exhaustive pairs into `dir`.
fn prepare(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let (l, r, p) = (
        dir.join("left.json"),
        dir.join("right.json"),
        dir.join("pairs.jsonl"),
    );
    ok(&[
        "extract",
        "--root",
        s(&fixture("original")),
        "--role",
        "original",
        "--name",
        "soot",
        "--out",
        s(&l),
    ]);
    ok(&[
        "extract",
        "--root",
        s(&fixture("redesigned")),
        "--role",
        "redesigned",
        "--name",
        "sootup",
        "--out",
        s(&r),
    ]);
    ok(&[
        "pairs",
        "--left",
        s(&l),
        "--right",
        s(&r),
        "--mode",
        "exhaustive",
        "--out",
        s(&p),
    ]);
    (l, r, p)
}

#[test]
fn version_exits_zero() {
    let out = remap(&["--version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("remap "));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(remap(&["score"]).status.code(), Some(2));
    assert_eq!(remap(&["frobnicate"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let out = remap(&[
        "extract",
        "--root",
        s(&dir.path().join("nope")),
        "--role",
        "original",
        "--out",
        s(&dir.path().join("x.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"]["kind"], "missing_input");
}

#[test]
fn fixture_pipeline_counts_and_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let (l, r, p) = prepare(dir.path());
    let summary = dir.path().join("summary.json");
    ok(&[
        "score",
        "--pairs",
        s(&p),
        "--left",
        s(&l),
        "--right",
        s(&r),
        "--task",
        "gc",
        "--format",
        "summary",
        "--out",
        s(&summary),
    ]);
    let v: Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    let counts = |k: &str| (v[k]["orig"].as_u64().unwrap(), v[k]["filt"].as_u64().unwrap());
    assert_eq!(counts("overall"), (528, 59));
    assert_eq!(counts("production"), (440, 55));
    assert_eq!(counts("test"), (88, 4));

    for out in [&l, &r, &p, &summary] {
        let manifest = PathBuf::from(format!("{}.manifest.json", out.display()));
        let m: Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
        assert!(m["tool_version"].is_string(), "{}", manifest.display());
        assert!(m["outputs"].as_array().is_some_and(|o| !o.is_empty()));
    }
}

#[test]
fn scoring_and_eval_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (l, r, p) = prepare(dir.path());
    let labels = fixture("labels.csv");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let scores = dir.path().join(format!("scores{run}.jsonl"));
        let eval = dir.path().join(format!("eval{run}.json"));
        let jobs = if run == 0 { "1" } else { "4" };
        ok(&[
            "--jobs",
            jobs,
            "score",
            "--pairs",
            s(&p),
            "--left",
            s(&l),
            "--right",
            s(&r),
            "--out",
            s(&scores),
        ]);
        ok(&[
            "eval",
            "--scores",
            s(&scores),
            "--dataset",
            s(&labels),
            "--key-left",
            s(&l),
            "--key-right",
            s(&r),
            "--out",
            s(&eval),
        ]);
        outputs.push((fs::read(&scores).unwrap(), fs::read(&eval).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let eval: Value = serde_json::from_slice(&outputs[0].1).unwrap();
    assert_eq!(eval["overall"]["counts"]["tp"], 15);
    assert_eq!(eval["overall"]["counts"]["fp"], 0);
}

#[test]
fn stale_snapshot_names_the_missing_id() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("original");
    fs::create_dir_all(&tree).unwrap();
    copy_tree(&fixture("original"), &tree);
    let (l, r, p) = (
        dir.path().join("l.json"),
        dir.path().join("r.json"),
        dir.path().join("p.jsonl"),
    );
    ok(&[
        "extract",
        "--root",
        s(&tree),
        "--role",
        "original",
        "--name",
        "soot",
        "--out",
        s(&l),
    ]);
    ok(&[
        "extract",
        "--root",
        s(&fixture("redesigned")),
        "--role",
        "redesigned",
        "--out",
        s(&r),
    ]);
    ok(&[
        "pairs",
        "--left",
        s(&l),
        "--right",
        s(&r),
        "--mode",
        "exhaustive",
        "--out",
        s(&p),
    ]);

    fs::remove_file(tree.join("src/main/java/soot/Local.java")).unwrap();
    ok(&[
        "extract",
        "--root",
        s(&tree),
        "--role",
        "original",
        "--name",
        "soot",
        "--out",
        s(&l),
    ]);
    let out = remap(&[
        "score",
        "--pairs",
        s(&p),
        "--left",
        s(&l),
        "--right",
        s(&r),
        "--out",
        s(&dir.path().join("scores.jsonl")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = error_of(&out);
    assert_eq!(err["error"]["kind"], "unresolved_id");
    assert!(err["error"]["message"].as_str().unwrap().contains("soot.Local#"));
}

#[test]
fn swapped_roles_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (l, r, p) = prepare(dir.path());
    let out = remap(&[
        "score",
        "--pairs",
        s(&p),
        "--left",
        s(&r),
        "--right",
        s(&l),
        "--out",
        s(&dir.path().join("scores.jsonl")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
