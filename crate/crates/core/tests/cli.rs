use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn ffrace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffrace"))
        .args(args)
        .output()
        .expect("spawn ffrace")
}

fn ok_stdout(args: &[&str]) -> String {
    let o = ffrace(args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    serde_json::from_str(&ok_stdout(args)).unwrap()
}

#[test]
fn ulmer_thm_instance() {
    let v = ok_json(&["ulmer", "--p", "3", "--k", "5", "--d", "5", "--json"]);
    assert_eq!(v["delta"], "1/2");
    assert_eq!(v["rank"], 1);
    assert_eq!(v["consistent"], true);
    let o = ffrace(&[
        "ulmer",
        "--p",
        "3",
        "--k",
        "5",
        "--d",
        "5",
        "--check-theorems",
    ]);
    assert!(o.status.success());
}

#[test]
fn lpoly_of_ulmer_d5() {
    let curve = data("ulmer_d5_q3.json");
    let v = ok_json(&["lpoly", "--curve", curve.to_str().unwrap(), "--degree", "4"]);
    let coeffs: Vec<i64> = v["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_i64().unwrap())
        .collect();
    assert_eq!(coeffs, vec![1, 0, 0, 0, -81]);
    assert_eq!(v["epsilon"], -1);
    assert_eq!(v["rank"], 1);
    assert!(v["purity_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn places_degree_one() {
    let out = ok_stdout(&["places", "--q", "3", "--max-degree", "1"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 1 + 4, "{out}");
    let v = ok_json(&["places", "--q", "3", "--max-degree", "1", "--json"]);
    assert!(v.is_object() || v.is_array());
}

#[test]
fn race_csv_header_and_rows() {
    let curve = data("ulmer_d5_q3.json");
    let out = ok_stdout(&[
        "race",
        "--curve",
        curve.to_str().unwrap(),
        "--max-X",
        "8",
        "--csv",
    ]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x,t_direct,t_explicit,sign"));
    assert_eq!(lines.count(), 8);
    let row4 = out.lines().nth(4).unwrap();
    assert!(row4.starts_with("4,") && row4.ends_with(",1"), "{row4}");
}

#[test]
fn lpoly_output_feeds_density() {
    let dir = tempfile::tempdir().unwrap();
    let curve = data("ulmer_d5_q3.json");
    let lp = dir.path().join("l.json");
    std::fs::write(
        &lp,
        ok_stdout(&["lpoly", "--curve", curve.to_str().unwrap(), "--json"]),
    )
    .unwrap();
    let v = ok_json(&["density", "--spectrum", lp.to_str().unwrap(), "--json"]);
    assert_eq!(v["method"], "exact-periodic");
    assert_eq!(v["period"], 4);
    assert_eq!(v["value"]["interval"], serde_json::json!(["1/2", "1/1"]));
}

#[test]
fn ulmer_output_feeds_limitlaw() {
    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("u.json");
    std::fs::write(
        &u,
        ok_stdout(&["ulmer", "--p", "3", "--k", "5", "--d", "5", "--json"]),
    )
    .unwrap();
    let args = [
        "limitlaw",
        "--spectrum",
        u.to_str().unwrap(),
        "--samples",
        "20000",
        "--seed",
        "7",
    ];
    let v = ok_json(&args);
    let mc = v["delta_mc"].as_f64().unwrap();
    let cf = v["delta_cf"].as_f64().unwrap();
    let se = v["se"].as_f64().unwrap();
    assert!((mc - cf).abs() <= (4.0 * se).max(0.01), "{mc} {cf} {se}");
    assert_eq!(ok_stdout(&args), ok_stdout(&args));
}

#[test]
fn twists_reproducible() {
    let curve = data("legendre_q5.json");
    let args = [
        "twists",
        "--curve",
        curve.to_str().unwrap(),
        "--d",
        "2",
        "--sample",
        "4",
        "--seed",
        "11",
    ];
    let a = ok_stdout(&args);
    assert_eq!(a, ok_stdout(&args));
    assert!(a.starts_with("f,l_degree,epsilon,"));
    assert_eq!(a.lines().count(), 5);
}

#[test]
fn ulmer_scan_table() {
    let out = ok_stdout(&["ulmer-scan", "--p-max", "5", "--d-max", "12"]);
    assert!(out.starts_with("p,k,d,q,n,epsilon_d,rank,period,delta_lo,delta_hi\n"));
    assert!(out.contains("\n3,1,5,3,2,0,1,4,"), "{out}");
}

#[test]
fn work_bound_exit_code() {
    let curve = data("ulmer_d5_q3.json");
    let o = ffrace(&[
        "--max-residue-field",
        "8",
        "lpoly",
        "--curve",
        curve.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "work-bound");
    assert_eq!(e["error"]["bound"], "max_residue_field");
    assert!(o.stdout.is_empty());
}

#[test]
fn config_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"max_residue_feild": 81}"#).unwrap();
    let o = ffrace(&[
        "--config",
        bad.to_str().unwrap(),
        "ulmer",
        "--p",
        "3",
        "--k",
        "1",
        "--d",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "parse");

    let good = dir.path().join("good.json");
    let curve = data("ulmer_d5_q3.json");
    std::fs::write(
        &good,
        format!(
            r#"{{"curve": {:?}, "format": "json"}}"#,
            curve.to_str().unwrap()
        ),
    )
    .unwrap();
    let v = ok_json(&["--config", good.to_str().unwrap(), "lpoly"]);
    assert_eq!(v["degree"], 4);
}

#[test]
fn usage_errors() {
    assert_eq!(ffrace(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ffrace(&["--help"]).status.code(), Some(0));
    let o = ffrace(&["ulmer", "--p", "2", "--k", "1", "--d", "3"]);
    assert_eq!(o.status.code(), Some(1));
}
