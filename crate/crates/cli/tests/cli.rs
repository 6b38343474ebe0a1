use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monodromic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

/// A 2×2 Jordan block at α = 0 with no vanishing cycles: `v·c = 0 ≠ -N_0`.
const CORRUPTED: &str = r#"{"kind":"gluing","version":"1.0.0","payload":{
  "psi":[{"alpha":"0","N":{"rows":2,"cols":2,"entries":[["0","1"],["0","0"]]},
          "F":[{"index":0,"generators":[["0","1"]]},{"index":1,"generators":[["1","0"],["0","1"]]}],
          "W":[{"index":-2,"generators":[["1","0"]]},{"index":0,"generators":[["1","0"],["0","1"]]}]}],
  "phi":{"dim":0,"F":[],"W":[]},
  "c":{"rows":0,"cols":2,"entries":[]},
  "v":{"rows":2,"cols":0,"entries":[[],[]]},
  "polarizable":true}}"#;

#[test]
fn gen_seed_zero_matches_golden() {
    let o = run(&["gen", "--seed", "0", "--cases", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), golden("gen_seed0.json"));
    assert_eq!(stdout(&run(&["gen", "--seed", "0", "--cases", "1"])), stdout(&o));
}

#[test]
fn generated_documents_validate() {
    let docs = stdout(&run(&["gen", "--seed", "9", "--cases", "25"]));
    let o = run_stdin(&["validate"], &docs);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run_stdin(&["roundtrip", "-"], &docs);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn transforms_produce_valid_documents() {
    let doc = golden("gen_seed0.json");
    for verb in ["fourier", "dual", "cycles"] {
        let o = run_stdin(&[verb], &doc);
        assert_eq!(o.status.code(), Some(0), "{verb}");
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert!(v.is_object(), "{verb}");
    }
    let f = stdout(&run_stdin(&["fourier"], &doc));
    assert_eq!(run_stdin(&["validate"], &f).status.code(), Some(0));
}

#[test]
fn expand_json_lists_pieces() {
    let o = run_stdin(&["--json", "expand", "--window", "2"], &golden("gen_seed0.json"));
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lo"], "-3");
    assert_eq!(v["hi"], "2");
    assert!(!v["pieces"].as_array().unwrap().is_empty());
}

#[test]
fn blocks_without_input_prints_tables() {
    let o = run(&["blocks", "--r", "3", "--m", "2"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["V"]["r"], 3);
    assert_eq!(v["S"]["components"].as_array().unwrap().len(), 2);
}

#[test]
fn suite_passes_and_reports_json() {
    let o = run(&["--json", "suite", "--name", "all", "--seed", "1", "--cases", "6", "--max-dim", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 6 * 7);
}

#[test]
fn empty_suite_is_vacuous_pass() {
    let o = run(&["suite", "--name", "roundtrip", "--cases", "0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn corrupted_datum_fails_with_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, CORRUPTED).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(run(&["validate", p]).status.code(), Some(2));
    assert_eq!(run(&["roundtrip", p]).status.code(), Some(2));
    let o = run(&["--json", "suite", "--name", "roundtrip", "--input", p]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let echoed = &v["results"][0]["counterexample"];
    assert_eq!(echoed, &serde_json::from_str::<Value>(CORRUPTED).unwrap());
}

#[test]
fn configuration_errors_exit_three() {
    assert_eq!(run(&["suite", "--name", "nope"]).status.code(), Some(3));
    assert_eq!(
        run(&["gen", "--denominators", "0", "--cases", "1"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["blocks", "--r", "0", "--m", "1"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
}

#[test]
fn malformed_input_is_reported_with_position() {
    let o = run_stdin(&["validate"], "{\n  \"kind\": }");
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2, column 11"), "{err}");

    let text = CORRUPTED.replace(r#""alpha":"0""#, r#""alpha":"1/2""#);
    let o = run_stdin(&["validate"], &text);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("alpha out of range"));
}
