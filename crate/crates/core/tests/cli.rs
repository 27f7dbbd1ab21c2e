use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pc-gauge")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pc-gauge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn check_consistent_matrix() {
    let v = run_json(&["check", fixture("consistent_124.json").to_str().unwrap()]);
    assert_eq!(v["covariant"], true);
    assert_eq!(v["contravariant"], true);
    assert_eq!(v["graph_consistent"], true);
}

#[test]
fn check_graph_with_loop() {
    let v = run_json(&["check", fixture("gamma5.json").to_str().unwrap()]);
    assert_eq!(v["graph_consistent"], false);
}

#[test]
fn malformed_and_missing_files_exit_2() {
    let bad = temp_file("bad.json", "{ not json");
    assert_eq!(run(&["check", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["check", "/definitely/not/here.json"]).status.code(), Some(2));
    let negative = temp_file(
        "negative.json",
        r#"{"group": {"kind": "rplus"}, "n": 2, "entries": [{"i": 1, "j": 2, "v": -3.0}]}"#,
    );
    assert_eq!(run(&["check", negative.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["indicator", fixture("triad_121.json").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn indicator_values() {
    let v = run_json(&["indicator", fixture("triad_121.json").to_str().unwrap(), "--kind", "kii3", "--localize"]);
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["worst_triad"], serde_json::json!([1, 2, 3]));
    let det = run_json(&["indicator", fixture("gl2_minus_identity.json").to_str().unwrap(), "--kind", "det"]);
    assert_eq!(det["value"].as_f64().unwrap(), 0.0);
    let generic = run_json(&["indicator", fixture("gl2_minus_identity.json").to_str().unwrap(), "--kind", "generic"]);
    assert!(generic["value"].as_f64().unwrap() > 0.5);
}

#[test]
fn indicator_group_mismatch_exits_1() {
    let out = run(&["indicator", fixture("triad_121.json").to_str().unwrap(), "--kind", "det"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn reduce_layered_cake() {
    let v = run_json(&["reduce", fixture("layered_cake.json").to_str().unwrap()]);
    assert_eq!(v["g2"]["value"].as_f64().unwrap(), 1.0 / 32.0);
    let m = temp_file("reduced.json", &v["matrix"].to_string());
    assert_eq!(run_json(&["check", m.to_str().unwrap(), "--tol", "1e-12"])["covariant"], true);
}

#[test]
fn reduce_needs_three_nodes() {
    let out = run(&["reduce", fixture("gamma5.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn weights_chain_and_lsq() {
    let v = run_json(&["weights", fixture("consistent_124.json").to_str().unwrap(), "--method", "chain"]);
    assert!(v["residual"].as_f64().unwrap() < 1e-24);
    let lambda: Vec<f64> = v["lambda"].as_array().unwrap().iter().map(|e| e["value"].as_f64().unwrap()).collect();
    for (got, want) in lambda.iter().zip([1.0, 0.5, 0.25]) {
        assert!((got - want).abs() < 1e-12);
    }
    let l = run_json(&["weights", fixture("triad_121.json").to_str().unwrap(), "--method", "lsq"]);
    let ln2 = 2f64.ln();
    assert!((l["residual"].as_f64().unwrap() - ln2 * ln2 / 3.0).abs() < 1e-12);
    let se2 = run(&["weights", fixture("se2_triad.json").to_str().unwrap()]);
    assert_eq!(se2.status.code(), Some(1));
}

#[test]
fn decompose_round_trip() {
    let input = fixture("se2_triad.json");
    let forward = run(&["decompose", input.to_str().unwrap()]);
    assert_eq!(forward.status.code(), Some(0));
    let phi: Value = serde_json::from_slice(&forward.stdout).unwrap();
    assert_eq!(phi["components"].as_array().unwrap().len(), 1);
    let phi_file = temp_file("phi.json", std::str::from_utf8(&forward.stdout).unwrap());
    let back = run_json(&["decompose", "--inverse", phi_file.to_str().unwrap()]);
    let original = pc_gauge::io::pc_matrix_from_json(&pc_gauge::io::read_json(&input).unwrap()).unwrap();
    let rebuilt = pc_gauge::io::pc_matrix_from_json(&back).unwrap();
    assert!(rebuilt.approx_eq(&original, 1e-12));
}

#[test]
fn graph_series() {
    let v = run_json(&["graph", fixture("gamma5.json").to_str().unwrap(), "--series", "4"]);
    assert_eq!(v["graph_consistent"], false);
    assert_eq!(v["generators"].as_array().unwrap().len(), 1);
    let c: Vec<f64> = v["series"]["coefficients"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(&c[..3], &[0.0, 0.0, 0.0]);
    assert!((c[3] - (1.0 - 1.0 / 1.2)).abs() < 1e-12);
    assert!(v.get("weights").is_none());
    let out = run(&["graph", fixture("gamma5.json").to_str().unwrap(), "--source", "9"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sample_is_reproducible() {
    let spec = fixture("lognormal_3.json");
    let args = ["sample", spec.to_str().unwrap(), "--ii", "kii3", "--eps", "0.1", "--n", "2000", "--seed", "5"];
    let a = run(&args);
    let b = run(&args);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "1"]);
    let c = run(&threaded);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["samples"], 2000);
    let bad = run(&["sample", spec.to_str().unwrap(), "--eps", "1.5"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn lifts_of_consistent_triad() {
    let v = run_json(&["lifts", fixture("distance_124.json").to_str().unwrap()]);
    assert_eq!(v["count"], 8);
    assert_eq!(v["lifts"].as_array().unwrap().len(), 8);
    assert_eq!(v["consistent"].as_array().unwrap().len(), 2);
    assert_eq!(v["triangle_inequality"], true);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        vec!["graph", "gamma5.json"],
        vec!["decompose", "se2_triad.json"],
        vec!["indicator", "triad_121.json", "--kind", "generic", "--localize"],
    ] {
        let path = fixture(args[1]);
        let mut full: Vec<&str> = args.clone();
        full[1] = path.to_str().unwrap();
        assert_eq!(run(&full).stdout, run(&full).stdout);
    }
}
