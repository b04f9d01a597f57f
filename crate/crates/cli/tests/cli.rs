use std::path::Path;
use std::process::Command;

use qdesign_cli::run;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qdesign").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const C3_C4: &str = r#"{"modulus": 15, "target": {"kind": "graceful_labeling", "set": [0, 1, 2, 4, 5, 8, 10], "lambda": 1,
  "graph": {"family": {"kind": "union", "parts": [{"kind": "cycle", "k": 3}, {"kind": "cycle", "k": 4}]}}}}"#;

const C7: &str = r#"{"modulus": 15, "target": {"kind": "graceful_labeling", "set": [0, 1, 2, 4, 5, 8, 10], "lambda": 1,
  "graph": {"family": {"kind": "cycle", "k": 7}}}}"#;

#[test]
fn verify_steiner_entry() {
    let (code, out, _) = call(&["verify", "--catalog", "steiner-13-3-1-q2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "qdesign-certificate/1");
    assert_eq!(v["confirmed"], true);
}

#[test]
fn expected_fail_entry_exits_zero() {
    let (code, out, _) = call(&["verify", "--catalog", "cliqueunion-15-not-D-graceful"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["confirmed"], true);
}

#[test]
fn verify_all_as_tsv() {
    let (code, out, _) = call(&["verify", "--all", "--format", "tsv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("entry\tcheck\tverdict\texpected\tconfirmed"));
    assert!(lines.all(|l| l.ends_with("\ttrue")));
}

#[test]
fn verify_input_file_with_wrong_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let raw = qdesign::catalog::raw_entry("singer-C7-15").unwrap();
    let mut v: Value = serde_json::from_str(&raw).unwrap();
    for (_, x) in v["expected"].as_object_mut().unwrap().iter_mut() {
        *x = Value::from("fail");
    }
    let p = write(dir.path(), "e.json", &v.to_string());
    let (code, _, err) = call(&["verify", "--input", &p]);
    assert_eq!(code, 1);
    assert!(err.contains("not confirmed"));
}

#[test]
fn usage_and_schema_errors() {
    assert_eq!(call(&[]).0, 2);
    assert_eq!(call(&["verify", "--catalog", "no-such-entry"]).0, 2);
    assert_eq!(call(&["verify"]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", r#"{"schema": "other/1", "id": "x"}"#);
    assert_eq!(call(&["verify", "--input", &p]).0, 2);
    let p = write(dir.path(), "spec.json", r#"{"target": {"kind": "nonsense"}}"#);
    assert_eq!(call(&["search", "--input", &p]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn admissible_steiner() {
    let (code, out, _) = call(&["admissible", "--v", "7", "--k", "3", "--q", "5", "--steiner"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "admissible");
    let (code, out, _) = call(&["admissible", "--v", "8", "--k", "3", "--q", "5", "--steiner", "--format", "tsv"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("not admissible\n"));
}

#[test]
fn admissible_table_and_counts() {
    let (code, out, _) = call(&["admissible", "--v", "7", "--q", "2", "--table"]);
    assert_eq!(code, 0);
    let rows: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(rows[0]["order"], 7);
    assert_eq!(rows[0]["sizes"], serde_json::json!([7, 9, 21]));
    let (code, _, _) = call(&["admissible", "--v", "7", "--q", "2", "--order", "7", "--size", "9", "--degree-gcd", "1"]);
    assert_eq!(code, 0);
    let (code, _, _) = call(&["admissible", "--v", "7", "--q", "2", "--order", "7", "--size", "8", "--degree-gcd", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn sizes_big_cell() {
    let (code, out, _) = call(&["sizes", "--v", "25", "--k", "3", "--q", "3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["family_size"], "2715668620");
    assert_eq!(call(&["sizes", "--v", "8", "--k", "3", "--q", "2"]).0, 1);
}

#[test]
fn search_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let c34 = write(dir.path(), "c34.json", C3_C4);
    let (code, out, _) = call(&["search", "--input", &c34]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "exhausted");
    assert_eq!(v["witness"], Value::Null);

    let c7 = write(dir.path(), "c7.json", C7);
    let (code, out, _) = call(&["search", "--input", &c7, "--seed", "9"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "found");
    assert_eq!(v["seed"], 9);

    let (code, out, _) = call(&["search", "--input", &c34, "--budget-nodes", "10"]);
    assert_eq!(code, 3);
    assert!(out.contains("budget_exceeded"));
}

#[test]
fn search_infeasible_count_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = C7.replace("\"k\": 7", "\"k\": 6");
    let p = write(dir.path(), "c6.json", &spec);
    let (code, _, err) = call(&["search", "--input", &p]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn emitted_certificate_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let c7 = write(dir.path(), "c7.json", C7);
    let out_path = dir.path().join("witness.json");
    let (code, _, _) = call(&["search", "--input", &c7, "--emit-certificate", "--output", out_path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, out, _) = call(&["verify", "--input", out_path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["entry"], "search-witness");
}

#[test]
fn catalog_list_show_export() {
    let (code, out, _) = call(&["catalog", "list"]);
    assert_eq!(code, 0);
    let ids: Vec<String> = serde_json::from_str(&out).unwrap();
    assert_eq!(ids.len(), 26);
    let (code, out, _) = call(&["catalog", "show", "q3star-7-q2"]);
    assert_eq!(code, 0);
    assert_eq!(out, qdesign::catalog::raw_entry("q3star-7-q2").unwrap());
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = call(&["catalog", "export", "--output", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 26);
}

#[test]
fn develop_small_family() {
    let (code, out, _) = call(&["develop", "--catalog", "cycle-7-C3-q2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["materialized"], true);
    assert_eq!(v["pair_violation_count"], 0);
    let (code, _, _) = call(&["develop", "--catalog", "singer-C7-15"]);
    assert_eq!(code, 2);
}

#[test]
fn catalog_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = call(&["catalog", "export", "--output", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap().to_str().unwrap().to_string();
        if name != "singer-C7-15.json" && name != "path-5-P3-q3.json" {
            std::fs::remove_file(p).unwrap();
        }
    }
    let bin = env!("CARGO_BIN_EXE_qdesign");
    let list = Command::new(bin)
        .args(["catalog", "list", "--format", "tsv"])
        .env("QDESIGN_CATALOG_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(list.status.code(), Some(0));
    assert_eq!(String::from_utf8(list.stdout).unwrap(), "path-5-P3-q3\nsinger-C7-15\n");

    let ok = Command::new(bin)
        .args(["verify", "--catalog", "singer-C7-15"])
        .env("QDESIGN_CATALOG_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let path = dir.path().join("singer-C7-15.json");
    let tampered = std::fs::read_to_string(&path).unwrap().replacen("\"labels\"", "\"lables\"", 1);
    std::fs::write(&path, tampered).unwrap();
    let bad = Command::new(bin)
        .args(["verify", "--catalog", "singer-C7-15"])
        .env("QDESIGN_CATALOG_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
}
