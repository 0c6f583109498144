use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use cyclicity_lab::approximants::opa;
use cyclicity_lab::polyrat::Poly;
use cyclicity_lab::spaces::Space;

fn lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclicity-lab"))
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_manifest(dir: &Path, text: &str) -> Output {
    let path = dir.join("manifest.json");
    std::fs::write(&path, text).unwrap();
    lab(dir, &["run", path.to_str().unwrap()])
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn mate_manifest_writes_the_mate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_manifest(
        dir.path(),
        r#"{"name": "m", "experiment": {"kind": "mate", "b": {"num": [[0.5,0],[0.5,0]], "den": [[1,0]]}}}"#,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = read_json(&dir.path().join("out/m.json"));
    let a = &rec["payload"]["a"]["num"];
    assert!((a[0][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((a[1][0].as_f64().unwrap() + 0.5).abs() < 1e-12);
    assert_eq!(rec["payload"]["N"], 1);
    assert_eq!(rec["manifest_hash"].as_str().unwrap().len(), 64);
    assert!(rec["conventions"].is_object() || rec["conventions"].is_string());
}

#[test]
fn cyclicity_csv_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_manifest(
        dir.path(),
        r#"{"name": "cyc", "experiment": {"kind": "cyclicity", "space": {"kind": "weighted-dirichlet", "params": {"alpha": 0.0}},
            "f": [[1,0],[-1,0]], "n_max": 32}}"#,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = read_json(&dir.path().join("out/cyc.json"));
    let csv = std::fs::read_to_string(dir.path().join("out/cyc.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with('#') && l.contains(rec["manifest_hash"].as_str().unwrap())));
    let space = Space::weighted_dirichlet(0.0).unwrap();
    let f = Poly::from_real(&[1.0, -1.0]);
    let mut rows = 0;
    for line in csv.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let mut cols = line.split(',');
        let n: usize = cols.next().unwrap().parse().unwrap();
        let d: f64 = cols.next().unwrap().parse().unwrap();
        assert!((d - opa(&space, &f, n).unwrap().distance).abs() <= 1e-12);
        rows += 1;
    }
    assert_eq!(rows, rec["payload"]["degrees"].as_array().unwrap().len());
    assert_eq!(rows, 7);
}

#[test]
fn malformed_manifest_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_manifest(dir.path(), r#"{"experiment": {"kind": "growth", "space": {"kind": "hardy"}, "n_max": "many"}}"#);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiment.n_max"));
}

#[test]
fn unknown_suite_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lab(dir.path(), &["suite", "nope"]).status.code(), Some(2));
}

#[test]
fn suites_are_listed_and_smoke_passes() {
    let dir = tempfile::tempdir().unwrap();
    let list = lab(dir.path(), &["list-suites"]);
    assert!(list.status.success());
    let names = String::from_utf8(list.stdout).unwrap();
    assert!(names.contains("smoke") && names.contains("paper-s5"));
    let smoke = lab(dir.path(), &["suite", "smoke"]);
    assert!(smoke.status.success(), "{}", String::from_utf8_lossy(&smoke.stdout));
    assert!(dir.path().join("out/suite-smoke.json").exists());
}

#[test]
fn reruns_and_thread_counts_give_identical_payloads() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = r#"{"name": "g", "experiment": {"kind": "growth", "space": {"kind": "besov-dirichlet", "params": {"p": 3.0, "alpha": 0.5}}, "n_max": 40}}"#;
    let path = dir.path().join("manifest.json");
    std::fs::write(&path, manifest).unwrap();
    let mut payloads = Vec::new();
    for threads in ["1", "4", "4"] {
        let out = lab(dir.path(), &["--threads", threads, "run", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        payloads.push(read_json(&dir.path().join("out/g.json"))["payload"].clone());
    }
    assert_eq!(payloads[0], payloads[1]);
    assert_eq!(payloads[1], payloads[2]);
}
