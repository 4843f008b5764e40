use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn gkdv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkdv")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas/stability_report.v1.json");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&doc).expect("schema compiles")
}

fn assert_schema(v: &Value) {
    let s = schema();
    let errors: Vec<String> = s.iter_errors(v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn every_command_output_matches_schema() {
    for cmd in ["wave", "indices", "band-trace", "real-scan", "hill", "validate"] {
        let v = json(&gkdv(&[cmd, "--preset", "kdv"]));
        assert_eq!(v["command"], cmd);
        assert_eq!(v["schema"], "gkdv.stability_report.v1");
        assert_schema(&v);
    }
    let v = json(&gkdv(&["sweep", "--p", "1", "--a", "0", "--c", "1", "--E=-0.1,-0.2,-0.05"]));
    assert_schema(&v);
    // The middle point lies below the well bottom and is kept as an error row.
    let rows = v["result"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["status"], "ok");
    assert_eq!(rows[1]["status"], "NoPeriodicOrbit");
    assert!(rows[1]["error"].is_string() && rows[1]["tr3"].is_null());
    assert_eq!(rows.iter().map(|r| r["index"].as_u64().unwrap()).collect::<Vec<_>>(), vec![0, 1, 2]);
}

#[test]
fn schema_rejects_tampered_output() {
    let mut v = json(&gkdv(&["indices", "--preset", "kdv"]));
    v["result"]["classification"]["modulational"] = Value::from("Maybe");
    assert!(!schema().is_valid(&v));
    let mut v = json(&gkdv(&["hill", "--preset", "kdv"]));
    v["result"]["spectra"][0]["unexpected"] = Value::from(1);
    assert!(!schema().is_valid(&v));
}

#[test]
fn indices_on_near_solitary_preset() {
    let v = json(&gkdv(&["indices", "--preset", "p5-near-solitary"]));
    let class = &v["result"]["classification"];
    assert_eq!(class["modulational"], "UnstableTwoBranches");
    assert_eq!(class["real_axis"], "OddPeriodicCount");
    let idx = &v["result"]["indices"];
    assert!(idx["orientation_jacobian"].as_f64().unwrap() < 0.0);
    assert!(idx["delta"].as_f64().unwrap() < 0.0);
}

#[test]
fn kdv_validate_passes_and_is_byte_identical() {
    let a = gkdv(&["validate", "--preset", "kdv"]);
    let b = gkdv(&["validate", "--preset", "kdv"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["result"]["failed"], 0);
    assert!(v["result"]["passed"].as_u64().unwrap() >= 20);
}

#[test]
fn exit_codes() {
    // Usage errors.
    assert_eq!(gkdv(&["--bogus"]).status.code(), Some(2));
    assert_eq!(gkdv(&["indices", "--p", "1", "--a", "0", "--c", "1", "--E", "abc"]).status.code(), Some(2));
    assert_eq!(gkdv(&["indices", "--preset", "no-such-preset"]).status.code(), Some(2));
    assert_eq!(gkdv(&["indices", "--preset", "kdv", "--tol", "-1"]).status.code(), Some(2));
    // A single-point command given a grid.
    assert_eq!(gkdv(&["indices", "--preset", "kdv", "--E=-0.1,-0.2"]).status.code(), Some(2));
    assert_eq!(gkdv(&["--help"]).status.code(), Some(0));
    assert_eq!(gkdv(&["--version"]).status.code(), Some(0));
    // Energy at the bottom of the well: the orbit degenerates to a point.
    let out = gkdv(&["wave", "--p", "1", "--a", "0", "--c", "1", "--E=-0.16666666666666666"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DegenerateOrbit"));
    // Below the well: no periodic orbit at all.
    let out = gkdv(&["indices", "--p", "1", "--a", "0", "--c", "1", "--E=-0.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NoPeriodicOrbit"));
}

#[test]
fn config_file_and_flag_priority() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"p": 1, "a": 0, "E": -0.12, "c": 1, "hill_n": 64, "gamma": [0.1]}"#).unwrap();
    let path = cfg.to_str().unwrap();
    let v = json(&gkdv(&["hill", "--config", path]));
    assert_eq!(v["config"]["E"], serde_json::json!([-0.12]));
    assert_eq!(v["config"]["hill_n"], 64);
    assert_eq!(v["result"]["spectra"][0]["modes"], 64);
    // Flags override the file.
    let v = json(&gkdv(&["hill", "--config", path, "--E=-0.08"]));
    assert_eq!(v["result"]["inputs"]["E"], -0.08);
    // Unknown keys are rejected, as is a missing file.
    std::fs::write(&cfg, r#"{"p": 1, "speed": 2}"#).unwrap();
    assert_eq!(gkdv(&["hill", "--config", path]).status.code(), Some(2));
    assert_eq!(gkdv(&["hill", "--config", "/nonexistent/run.json"]).status.code(), Some(2));
}

#[test]
fn config_hash_tracks_settings() {
    let a = json(&gkdv(&["hill", "--preset", "kdv", "--gamma", "0.1"]));
    let b = json(&gkdv(&["hill", "--preset", "kdv", "--gamma", "0.1"]));
    let c = json(&gkdv(&["hill", "--preset", "kdv", "--gamma", "0.2"]));
    assert_eq!(a["config_hash"], b["config_hash"]);
    assert_ne!(a["config_hash"], c["config_hash"]);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bands.csv");
    let to_file = gkdv(&["band-trace", "--preset", "kdv", "--format", "csv", "--out", file.to_str().unwrap()]);
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    let to_stdout = gkdv(&["band-trace", "--preset", "kdv", "--format", "csv"]);
    assert_eq!(std::fs::read(&file).unwrap(), to_stdout.stdout);
    let text = String::from_utf8(to_stdout.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("branch,kappa,re_mu,im_mu,residual"));
}

#[test]
fn empty_sweep_gives_header_only() {
    let out = gkdv(&["sweep", "--p", "1", "--a", "0", "--c", "1", "--E", "0:1:0", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("index,a,E,c,status,error"));
    let v = json(&gkdv(&["sweep", "--p", "1", "--a", "0", "--c", "1", "--E", "0:1:0"]));
    assert_eq!(v["result"], serde_json::json!([]));
}

#[test]
fn sweep_csv_has_one_row_per_point_in_grid_order() {
    let out = gkdv(&["sweep", "--preset", "kdv", "--format", "csv"]);
    assert!(out.status.success());
    let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
    let energies: Vec<f64> = rd.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(energies.len(), 6);
    assert!(energies.windows(2).all(|w| w[0] < w[1]), "{energies:?}");
}
