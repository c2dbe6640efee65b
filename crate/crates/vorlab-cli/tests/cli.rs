use std::process::{Command, Output};

use serde_json::Value;

fn vorlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vorlab")).args(args).output().expect("binary runs")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn config(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn gauss_sum_has_unit_modulus() {
    let o = vorlab(&["gauss-sum", "--l", "7", "--a", "2", "--index", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["command"], "gauss-sum");
    let abs: f64 = r["result"]["abs"].as_str().unwrap().parse().unwrap();
    assert!((abs - 1.0).abs() < 1e-10);
    for key in ["config", "result", "discrepancies", "truncation", "timing_ms"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn imprimitive_character_is_a_usage_error() {
    let o = vorlab(&["gauss-sum", "--l", "5", "--a", "2", "--index", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(vorlab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(vorlab(&["gauss-sum", "--l", "5"]).status.code(), Some(2));
}

#[test]
fn malformed_and_unknown_keys_exit_2() {
    let dir = std::env::temp_dir();
    let bad = dir.join("vorlab_bad_key.json");
    std::fs::write(&bad, r#"{"form":"delta","l":5,"a":1,"b":7,"m":50,"extra":true}"#).unwrap();
    let o = vorlab(&["verify-voronoi", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("extra"));

    let broken = dir.join("vorlab_broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    assert_eq!(vorlab(&["verify-voronoi", "--config", broken.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(vorlab(&["verify-voronoi", "--config", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn verify_voronoi_passes_and_reports_truncation() {
    let o = vorlab(&["verify-voronoi", "--config", &config("case6.json"), "--deterministic"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    let rel: f64 = r["result"]["rel_error"].as_str().unwrap().parse().unwrap();
    assert!(rel < 1e-6);
    assert!(r["truncation"]["tail_estimate"].is_string());
    assert_eq!(r["timing_ms"], 0);
}

#[test]
fn tolerance_override_turns_into_failure() {
    let o = vorlab(&["verify-voronoi", "--config", &config("case6.json"), "--tolerance", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(&o)["pass"], false);
}

#[test]
fn deterministic_reruns_are_byte_identical() {
    let args = ["farey-dissect", "--l", "3", "--q", "2", "--r", "-1", "--alpha-from-char", "1", "--deterministic"];
    let a = vorlab(&args);
    let b = vorlab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_count_is_recorded_from_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_vorlab"))
        .args(["newform", "--name", "delta", "--n", "5"])
        .env("VORLAB_THREADS", "3")
        .output()
        .unwrap();
    let r = report(&o);
    assert_eq!(r["threads"], 3);
    let c: Vec<&str> = r["result"]["coefficients"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(c, ["1", "-24", "252", "-1472", "4830"]);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join("vorlab_out_test.json");
    let _ = std::fs::remove_file(&path);
    let o = vorlab(&["mellin-roundtrip", "--l", "5", "--kappa", "2", "--trials", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let err: f64 = r["result"]["max_error"].as_str().unwrap().parse().unwrap();
    assert!(err < 1e-12);
}

#[test]
fn c_table_marks_dash_rows() {
    let o = vorlab(&["c-table", "--family", "ps-split", "--l", "5", "--t", "-2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    let rows = r["result"]["rows"].as_array().unwrap();
    assert!(rows.iter().any(|row| row["entry"].get("not_addressable").is_some()));
    assert!(rows.iter().any(|row| row["entry"].get("value").is_some()));
}

#[test]
fn bessel_transform_meets_target() {
    let o = vorlab(&["bessel-transform", "--weight", "12", "--y", "2.5", "--window", "50,100"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["result"]["target_met"], true);
}

#[test]
fn lsc_check_single_level() {
    let o = vorlab(&["lsc-check", "--c", "2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn suite_runs_one_criterion() {
    let o = vorlab(&["suite", "--only", "13", "--deterministic"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["result"]["passed"], 1);
    assert_eq!(vorlab(&["suite", "--only", "99"]).status.code(), Some(2));
}
