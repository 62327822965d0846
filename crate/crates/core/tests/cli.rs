use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kzmodp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kzmodp")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    let out = kzmodp(&[
        "solve", "--p", "3", "--kappa", "4/1", "--m", "2,2", "--k", "2", "--q", "0,0", "--l", "1,1", "--out", path(&sol),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    assert_eq!(written["provenance"]["exponents"]["mij"], serde_json::json!([2]));
    assert_eq!(written["coords"].as_array().unwrap().len(), 3);
    for what in ["kz", "singular", "ze"] {
        let out = kzmodp(&["check", what, "--sol", path(&sol)]);
        assert_eq!(out.status.code(), Some(0), "{what}");
        assert_eq!(json(&out)["passed"], Value::Bool(true));
    }
}

#[test]
fn factored_solution_checks() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    let out = kzmodp(&[
        "solve", "--p", "3", "--kappa", "4", "--m", "1,1,1,1,1", "--k", "2", "--l", "4,3", "--factored", "--out", path(&sol),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for what in ["kz", "singular"] {
        assert_eq!(kzmodp(&["check", what, "--sol", path(&sol)]).status.code(), Some(0), "{what}");
    }
    let out = kzmodp(&["check", "ze", "--sol", path(&sol), "--ell", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn tampered_solution_fails() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    kzmodp(&["solve", "--p", "5", "--kappa", "6", "--m", "1,2,1", "--k", "2", "--q", "1,3", "--out", path(&sol)]);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    let terms = v["coords"][0]["poly"]["terms"].as_array_mut().unwrap();
    assert!(!terms.is_empty());
    let c = terms[0]["c"].as_u64().unwrap();
    terms[0]["c"] = Value::from((c + 1) % 5);
    std::fs::write(&sol, v.to_string()).unwrap();
    let out = kzmodp(&["check", "kz", "--sol", path(&sol)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["witness"].is_object());
}

#[test]
fn exponent_override() {
    let dir = tempfile::tempdir().unwrap();
    let exps = dir.path().join("exps.json");
    std::fs::write(&exps, r#"{"ms":[3,3,3],"mij":[16,16,16],"m0":1,"kinv":4}"#).unwrap();
    let sol = dir.path().join("sol.json");
    let out = kzmodp(&[
        "solve", "--p", "7", "--kappa", "2", "--m", "1,1,1", "--k", "1", "--exponents", path(&exps), "--factored", "--out",
        path(&sol),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(kzmodp(&["check", "kz", "--sol", path(&sol)]).status.code(), Some(0));

    std::fs::write(&exps, r#"{"ms":[3,3,3],"mij":[15,16,16],"m0":1,"kinv":4}"#).unwrap();
    let out = kzmodp(&["solve", "--p", "7", "--kappa", "2", "--m", "1,1,1", "--k", "1", "--exponents", path(&exps)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spec_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"p":3,"kappa":"4/1","m":[2,2],"k":2,"q":[0,0],"l":[1,1]}"#).unwrap();
    let a = kzmodp(&["solve", "--spec", path(&spec)]);
    let b = kzmodp(&["solve", "--p", "3", "--kappa", "4", "--m", "2,2", "--k", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors() {
    assert_eq!(kzmodp(&["solve", "--p", "3", "--kappa", "3", "--m", "1,1", "--k", "1"]).status.code(), Some(2));
    assert_eq!(kzmodp(&["solve", "--p", "4", "--kappa", "3", "--m", "1,1", "--k", "1"]).status.code(), Some(2));
    assert_eq!(kzmodp(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(kzmodp(&["curve", "cubic3", "--p", "5"]).status.code(), Some(2));
    assert_eq!(kzmodp(&["curve", "elliptic", "--p", "3"]).status.code(), Some(2));
}

#[test]
fn integrate_reports_values() {
    let out = kzmodp(&["integrate", "--p", "5", "--kappa", "2", "--m", "1,1,1", "--k", "1", "--x", "0,1,3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for e in v["values"].as_array().unwrap() {
        assert_eq!(e["taylor"], e["grid"]);
    }
    let out = kzmodp(&["integrate", "--p", "7", "--kappa", "4", "--m", "2,2", "--k", "2", "--x", "1,5", "--gamma"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["gamma"]["cell_sizes"].is_array());
}

#[test]
fn curve_commands() {
    let out = kzmodp(&["curve", "genus2", "--p", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["tuples"].as_array().unwrap().len(), 210);
    let out = kzmodp(&["curve", "surface", "--p", "11", "--samples", "5", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let out = kzmodp(&["curve", "elliptic", "--p", "3", "--x", "0,1,2", "--no-gate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn suite_is_deterministic() {
    let run = || kzmodp(&["suite", "--level", "quick", "--seed", "42", "--criterion", "1,4,7,9"]);
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 4);
    assert_eq!(v["passed"], Value::Bool(true));
}
