use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn twistor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = twistor(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(args: &[&str]) -> i32 {
    twistor(args).status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn classify_examples() {
    let r = json(&["classify", "0", "0", "0", "--n", "2"]);
    assert_eq!(r["class"], "Spherical");
    assert_eq!(r["representations"]["classes"], 3);
    let r = json(&["classify", "2", "2", "2", "--n", "2"]);
    assert_eq!(r["class"], "Hyperbolic");
    assert_eq!(r["representations"]["classes"], 1);
    let r = json(&["classify", "0", "0", "1", "--n", "4"]);
    assert_eq!(r["class"], "Cylindrical");
    assert_eq!(r["representations"]["classes"], 3);
}

#[test]
fn exact_mode_reports_rationals() {
    let r = json(&["classify", "1/2", "-1/3", "1/4", "--mode", "exact"]);
    assert_eq!(r["mode"], "exact");
    assert_eq!(r["params"]["beta"], "-1/3");
    // det Q = 1/4 + 1/9 + 1/16 − 1/12 − 1
    assert_eq!(r["detQ"], "-95/144");
    assert_eq!(r["c_squared"], "95/144");
}

#[test]
fn rep_then_triangle_reproduces_the_class() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str, u64); 4] = [
        (&["0.3", "-0.45", "0.2", "--n", "2", "--k", "1"], "Spherical", 1),
        (&["0.3", "-0.45", "0.2", "--n", "3", "--k", "0"], "Spherical", 0),
        (&["2", "2", "2", "--n", "1"], "Hyperbolic", 1),
        (&["0", "0", "1", "--n", "3", "--k", "1"], "Cylindrical", 1),
    ];
    for (idx, (args, class, k)) in cases.into_iter().enumerate() {
        for format in ["json", "text"] {
            let file = dir.path().join(format!("rep{idx}.{format}"));
            let mut full = vec!["rep"];
            full.extend_from_slice(args);
            full.extend_from_slice(&["--format", format, "--out", path_str(&file)]);
            assert_eq!(code(&full), 0, "{full:?}");
            let tri = json(&["triangle", path_str(&file)]);
            assert_eq!(tri["class"], class, "{full:?}");
            assert_eq!(tri["representation"]["k"], k, "{full:?}");
        }
    }
}

#[test]
fn faithful_representations() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("faithful.json");
    assert_eq!(code(&["rep", "0", "0", "0", "--n", "2", "--faithful", "--out", path_str(&file)]), 0);
    let tri = json(&["triangle", path_str(&file)]);
    assert_eq!(tri["representation"]["faithful"], true);
    assert_eq!(tri["image_dim"], 8);
    assert_eq!(code(&["rep", "0", "0", "0", "--n", "1", "--faithful"]), 2);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("rep.json");
    assert_eq!(code(&["rep", "-0.5", "0.25", "0.6", "--n", "2", "--k", "1", "--out", path_str(&rep)]), 0);
    let runs: [&[&str]; 3] = [
        &["classify", "0.1", "0.2", "-0.3", "--n", "3"],
        &["triangle", path_str(&rep)],
        &["fiber", "0.3", "-0.45", "0.2", "--n", "3", "--k", "2", "--seed", "4"],
    ];
    for args in runs {
        assert_eq!(twistor(args).stdout, twistor(args).stdout, "{args:?}");
    }
    let again = dir.path().join("rep2.json");
    assert_eq!(code(&["rep", "-0.5", "0.25", "0.6", "--n", "2", "--k", "1", "--out", path_str(&again)]), 0);
    assert_eq!(std::fs::read(&rep).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn fiber_components() {
    for k in 0..=2u64 {
        let r = json(&["fiber", "0.3", "-0.45", "0.2", "--n", "2", "--k", &k.to_string()]);
        assert_eq!(r["product_in_GH"], true);
        assert_eq!(r["certificate"]["k"], k);
        assert!(r["product_minus_id"].as_f64().unwrap() < 1e-9);
    }
    let r = json(&["fiber", "0.3", "-0.45", "0.2", "--n", "2", "--k", "1"]);
    assert_eq!(r["factors_in_GH"], serde_json::json!([false, false, false]));
    assert_eq!(r["component"]["component_dim"], 12 * 4 + 8 * 2 - 8);
}

#[test]
fn fiber_witness_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w.json");
    let r = json(&["fiber", "0.1", "0.2", "-0.3", "--n", "3", "--k", "1", "--witness-out", path_str(&file)]);
    assert_eq!(r["certificate"]["k"], 1);
    let w: Value = serde_json::from_slice(&std::fs::read(&file).unwrap()).unwrap();
    for key in ["g1", "g2", "g3", "I1", "I2", "I3"] {
        assert_eq!(w[key].as_array().map(Vec::len), Some(12), "{key}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["classify", "0", "0"]), 1);
    assert_eq!(code(&["classify", "x", "0", "0"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["rep", "0", "0", "0", "--n", "1", "--k", "3"]), 2);
    assert_eq!(code(&["fiber", "2", "2", "2", "--n", "1", "--k", "0"]), 2);
    assert_eq!(code(&["classify", "0", "0", "0", "--tol=-1"]), 1);
    assert_eq!(code(&["triangle", "/nonexistent/file.json"]), 2);
}

#[test]
fn text_format_lines() {
    let out = twistor(&["classify", "2", "2", "2", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "class = Hyperbolic"));
    assert!(text.lines().any(|l| l == "detQ = 2.7000000000000000e1"));
}

#[test]
fn selftest_exit_codes() {
    let out = twistor(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["checks"].as_array().map(Vec::len), Some(9));
    assert_eq!(code(&["selftest", "--tol", "1e-15", "--mode", "float"]), 3);
}
