use std::path::Path;
use std::process::{Command, Output};

fn opmat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opmat"))
        .args(args)
        .env_remove("OPMAT_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn f2_file(dir: &Path, name: &str, c1: f64, c2: f64, d: f64) -> String {
    let path = dir.join(name);
    let text = format!(
        r#"{{"n": 2, "p": 1,
            "A": [[[1,0],[0,0]],[[0,0],[1,0]]],
            "B": [[[1,0]],[[0,0]]],
            "C": [[[{c1},0],[{c2},0]]],
            "D": [[[{d},0]]]}}"#
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).expect("stdout is JSON")
}

#[test]
fn analyze_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let invertible = opmat(&["analyze", &f2_file(dir.path(), "a.json", 0.0, 0.0, 1.0)]);
    assert_eq!(invertible.status.code(), Some(0));
    let report = json(&invertible);
    assert_eq!(report["verdict"], "Invertible");
    assert_eq!(report["agreement"], true);

    let singular = opmat(&["analyze", &f2_file(dir.path(), "b.json", 1.0, 5.0, 1.0)]);
    assert_eq!(singular.status.code(), Some(1));
    let report = json(&singular);
    assert_eq!(report["verdict"], "Singular");
    assert!(report["witness"].is_array());
}

#[test]
fn report_fields_keep_their_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&opmat(&["analyze", &f2_file(dir.path(), "a.json", 0.0, 0.0, 1.0)]));
    let keys = [
        "\"verdict\"",
        "\"reason\"",
        "\"cond_i\"",
        "\"reduced_shape\"",
        "\"reduced_sigma_min\"",
        "\"oracle_sigma_min\"",
        "\"agreement\"",
        "\"dims\"",
        "\"zero_residual\"",
        "\"umv_residual\"",
    ];
    let at: Vec<usize> = keys.iter().map(|k| out.find(k).unwrap()).collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]), "{out}");
}

#[test]
fn text_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = opmat(&["analyze", &f2_file(dir.path(), "a.json", 0.0, 0.0, 1.0), "--format", "text"]);
    assert!(stdout(&out).starts_with("verdict            Invertible"));
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 2, "p": 1, "A": [[[1,0],[0,"x"]]]}"#).unwrap();
    let out = opmat(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("A[0][1][1]"));

    assert_eq!(opmat(&["analyze", "/does/not/exist.json"]).status.code(), Some(3));
    assert_eq!(opmat(&["frobnicate"]).status.code(), Some(3));

    let file = f2_file(dir.path(), "a.json", 0.0, 0.0, 1.0);
    let out = Command::new(env!("CARGO_BIN_EXE_opmat"))
        .args(["analyze", &file])
        .env("OPMAT_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(opmat(&["analyze", &file, "--tol", "-1"]).status.code(), Some(3));
}

#[test]
fn generate_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["generate", "--kind", "rank_structured", "--n", "4", "--p", "3", "--rank-a", "3", "--rank-b", "2", "--intersect", "1", "--seed", "9"];
    let first = opmat(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, opmat(&args).stdout);

    let path = dir.path().join("inst.json");
    let out = opmat(&[&args[..], &["-o", path.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0));
    let a = opmat(&["analyze", path.to_str().unwrap()]);
    let b = opmat(&["analyze", path.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["agreement"], true);

    let bad = opmat(&["generate", "--kind", "rank_structured", "--n", "4", "--p", "3", "--rank-a", "1", "--rank-b", "1", "--intersect", "0"]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn hamiltonian_files_omit_d() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let out = opmat(&["generate", "--kind", "hamiltonian", "--n", "3", "--seed", "4", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file["kind"], "hamiltonian");
    assert!(file.get("D").is_none());
    let report = json(&opmat(&["analyze", path.to_str().unwrap()]));
    assert_eq!(report["agreement"], true);
    assert!(report["range_identity_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn dense_batch_agrees_everywhere() {
    let out = opmat(&["batch", "--kind", "dense", "--count", "1000", "--seed", "42", "--max-dim", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = &json(&out)["summary"];
    assert_eq!(summary["agreement_rate"], 1.0);
    assert_eq!(summary["disagreements"].as_array().unwrap().len(), 0);
}

#[test]
fn batch_reports_are_ordered_and_reproducible() {
    let args = ["batch", "--kind", "singular_planted", "--count", "30", "--seed", "5", "--max-dim", "5", "--reports"];
    let a = opmat(&args);
    assert_eq!(a.stdout, opmat(&args).stdout);
    let v = json(&a);
    let items = v["items"].as_array().unwrap();
    assert!(items.iter().enumerate().all(|(i, it)| it["index"] == i));
    assert!(items.iter().all(|it| it["report"]["verdict"] == "Singular"));
}

#[test]
fn selftest_passes() {
    let out = opmat(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
}
