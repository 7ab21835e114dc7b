//! The `floorcast` binary: subcommands, artifacts and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn floorcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floorcast"))
        .args(args)
        .env("FLOORCAST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = floorcast(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn synth(dir: &Path) -> String {
    let corpus = dir.join("corpus_root");
    ok(&[
        "synth",
        "--out",
        corpus.to_str().unwrap(),
        "--n-states",
        "2",
        "--chambers",
        "1",
        "--sessions",
        "2",
        "--bills-per-slice",
        "120",
        "--seed",
        "4",
    ]);
    corpus.to_str().unwrap().to_string()
}

#[test]
fn evaluate_writes_one_row_per_slice_and_model() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(tmp.path());
    let out = tmp.path().join("eval");
    ok(&[
        "evaluate",
        "--corpus",
        &corpus,
        "--out",
        out.to_str().unwrap(),
        "--feature-set",
        "combined",
        "--folds",
        "10",
        "--seed",
        "7",
    ]);
    let report = std::fs::read_to_string(out.join("report.tsv")).unwrap();
    let rows: Vec<&str> = report.lines().skip(1).collect();
    assert_eq!(rows.len(), 2 * 5);
    for state in ["ak", "al"] {
        for model in ["baseline", "loglinear", "nbsvm", "gbm", "stacked"] {
            let prefix = format!("{state}\tupper\tcombined\t{model}\t10\t");
            assert_eq!(rows.iter().filter(|r| r.starts_with(&prefix)).count(), 1, "{prefix}");
        }
    }
    // nothing written outside the two requested directories
    let mut top: Vec<String> = std::fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    top.sort();
    assert_eq!(top, ["corpus_root", "eval"]);
}

#[test]
fn train_then_analyze_phrases() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(tmp.path());
    let out = tmp.path().join("run");
    let o = out.to_str().unwrap();
    ok(&["train", "--corpus", &corpus, "--out", o, "--feature-set", "just_txt", "--seed", "1"]);
    ok(&["analyze", "--out", o, "--phrases"]);
    for slice in ["ak_upper", "al_upper"] {
        let path = out.join("analysis").join(format!("phrases_{slice}.tsv"));
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("top\t")).count(), 12);
        assert_eq!(text.lines().filter(|l| l.starts_with("bottom\t")).count(), 12);
    }
    // the default ranking needs just_spon / no_txt_spon models
    ok(&["train", "--corpus", &corpus, "--out", o, "--feature-set", "just_spon,no_txt_spon", "--seed", "1"]);
    ok(&["analyze", "--out", o]);
    let ranks = std::fs::read_to_string(out.join("analysis").join("ranks.tsv")).unwrap();
    assert!(ranks.lines().any(|l| l.starts_with("spon:") && l.contains("\tjust_spon\t")));
    assert!(ranks.lines().any(|l| l.starts_with("cmte:") && l.contains("\tno_txt_spon\t")));
}

#[test]
fn ingest_and_featurize() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(tmp.path());
    let out = tmp.path().join("work");
    let o = out.to_str().unwrap();
    ok(&["ingest", "--corpus", &corpus, "--out", o]);
    let labels = std::fs::read_to_string(out.join("labels.tsv")).unwrap();
    assert_eq!(labels.lines().next().unwrap(), "bill_id\tstate\tchamber\tsession\tbill_type\tlabel");
    assert!(out.join("corpus").join("bills.jsonl").is_file());
    ok(&["featurize", "--corpus", o, "--out", o, "--feature-set", "no_txt", "--states", "AK"]);
    let dir = out.join("features").join("no_txt").join("ak_upper");
    assert!(dir.join("registry.tsv").is_file() && dir.join("vectors.tsv").is_file());
    assert!(!out.join("features").join("no_txt").join("al_upper").exists());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(floorcast(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(floorcast(&["evaluate", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(floorcast(&["evaluate", "--folds", "1", "--seed", "1"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(tmp.path());
    // training without a seed
    let out = floorcast(&["train", "--corpus", &corpus, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn data_errors_exit_1_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("corpus");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("bills.jsonl"), "{\"id\":\"b1\"}\n").unwrap();
    std::fs::write(dir.join("legislators.jsonl"), "").unwrap();
    std::fs::write(dir.join("committees.jsonl"), "").unwrap();
    let out = floorcast(&["ingest", "--corpus", tmp.path().to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bills.jsonl:1:"), "{err}");
}
