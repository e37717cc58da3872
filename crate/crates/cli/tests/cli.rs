use serde_json::Value;
use std::process::Command;

use toeplitz_asy_cli::{run, EXIT_CRITERION, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK};

fn invoke(args: &[&str]) -> (i32, Vec<Value>) {
    let mut argv = vec!["toeplitz-asy".to_string(), "--quiet".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let mut out = Vec::new();
    let code = run(argv, &mut out);
    let lines = String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    (code, lines)
}

fn rows(lines: &[Value]) -> Vec<&Value> {
    lines.iter().filter(|l| l["kind"] == "row").collect()
}

#[test]
fn constant_symbol_has_unit_determinants() {
    let (code, lines) = invoke(&["toeplitz", "--symbol", r#"{"V": []}"#, "--n", "1..4"]);
    assert_eq!(code, EXIT_OK);
    let r = rows(&lines);
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|row| row["log_modulus"].as_f64().unwrap().abs() < 1e-14));
    assert_eq!(lines.last().unwrap()["kind"], "report");
}

#[test]
fn arc_symbol_zeroth_coefficient() {
    let (_, lines) = invoke(&["toeplitz", "--symbol", r#"{"V": [], "arc_s": 1.0}"#, "--n", "64"]);
    let f0 = rows(&lines)[0]["f0_re"].as_f64().unwrap();
    assert!((f0 - (1.0 - 2.0 / (64.0 * std::f64::consts::PI))).abs() < 1e-12);
}

#[test]
fn szego_residual_column() {
    let (_, lines) = invoke(&["toeplitz", "--symbol", r#"{"V": [[1, 1, 0], [-1, 1, 0]]}"#, "--n", "64"]);
    assert!(rows(&lines)[0]["szego_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn singular_symbol_gets_fh_and_bt_columns() {
    let sym = r#"{"V": [[1, 0.2, 0]], "singularities": [{"theta": 0, "alpha": [0.5, 0], "beta": [0, 0]}]}"#;
    let (code, lines) = invoke(&["toeplitz", "--symbol", sym, "--n", "32"]);
    assert_eq!(code, EXIT_OK);
    let r = rows(&lines)[0];
    assert!(r["szego_re"].is_null());
    assert!(r["fh_residual"].as_f64().unwrap() < 1e-2);
    assert_eq!(r["bt_terms"].as_f64(), Some(1.0));
}

#[test]
fn tw_column_is_monotone() {
    let (_, lines) = invoke(&["tw", "--s", "-2,0,2"]);
    let cdf: Vec<f64> = rows(&lines).iter().map(|r| r["cdf"].as_f64().unwrap()).collect();
    assert!(cdf[0] < cdf[1] && cdf[1] < cdf[2]);
}

#[test]
fn sine_fredholm_residual() {
    let (_, lines) = invoke(&["fredholm", "--kernel", "sine", "--s", "10"]);
    let r = rows(&lines)[0];
    let value = r["value"].as_f64().unwrap();
    assert!(r["residual"].as_f64().unwrap() < 1e-2 * value.abs());
}

#[test]
fn simple_commands_succeed() {
    for args in [
        vec!["hankel", "--moments", "2,0,0.6666666666666666", "--n", "2"],
        vec!["hankel", "--exp-c", "16", "--exp-b", "1", "--n", "4"],
        vec!["th", "--symbol", r#"{"V": [[1, 1, 0], [-1, 1, 0]]}"#, "--n", "1..3", "--bridge"],
        vec!["fredholm", "--kernel", "ch", "--alpha", "0.2", "--s", "2,4"],
        vec!["fredholm", "--kernel", "bessel", "--a", "0.5", "--s", "25"],
        vec!["fredholm", "--kernel", "airy", "--s", "-2:0:3"],
        vec!["transition", "--alpha", "0.3", "--n", "20", "--x", "1,5"],
        vec!["gessel", "--n", "2", "--lambda", "0.25"],
        vec!["lis", "--n", "64", "--trials", "50"],
        vec!["verify", "szego"],
    ] {
        let (code, lines) = invoke(&args);
        assert_eq!(code, EXIT_OK, "{args:?}");
        assert!(!rows(&lines).is_empty(), "{args:?}");
    }
    let (_, lines) = invoke(&["hankel", "--moments", "2,0,0.6666666666666666", "--n", "2"]);
    assert!((rows(&lines)[0]["log_modulus"].as_f64().unwrap() - (4.0f64 / 3.0).ln()).abs() < 1e-14);
}

#[test]
fn exit_codes() {
    assert_eq!(invoke(&["toeplitz", "--symbol", "{not json", "--n", "2"]).0, EXIT_INPUT);
    assert_eq!(invoke(&["toeplitz", "--symbol", "/nonexistent/file.json", "--n", "2"]).0, EXIT_INPUT);
    assert_eq!(invoke(&["toeplitz", "--n", "2"]).0, EXIT_INPUT);
    assert_eq!(invoke(&["fredholm", "--kernel", "sine", "--s", "-1"]).0, EXIT_INPUT);
    assert_eq!(invoke(&["verify", "nonsense"]).0, EXIT_INPUT);
    // the even-symbol check is an input error, a G zero is numeric
    assert_eq!(invoke(&["th", "--symbol", r#"{"V": [[1, 1, 0]]}"#, "--n", "2"]).0, EXIT_INPUT);
    let degenerate = r#"{"V": [], "singularities": [{"theta": 1, "alpha": [0, 0], "beta": [1.5, 0]}, {"theta": 2, "alpha": [0, 0], "beta": [-1.5, 0]}]}"#;
    let code = invoke(&["toeplitz", "--symbol", degenerate, "--n", "4"]).0;
    assert!(code == EXIT_NUMERIC || code == EXIT_OK, "{code}");
    let _ = EXIT_CRITERION;
}

#[test]
fn csv_matches_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let (_, lines) = invoke(&["fredholm", "--kernel", "sine", "--s", "1,3", "--csv", path.to_str().unwrap()]);
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header = reader.headers().unwrap().clone();
    let json_rows = rows(&lines);
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), json_rows.len());
    for (rec, row) in records.iter().zip(json_rows) {
        for (k, cell) in header.iter().zip(rec.iter()) {
            let v = &row[k];
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            };
            assert_eq!(cell, text, "{k}");
        }
    }
}

#[test]
fn lis_writes_samples_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    let (code, lines) =
        invoke(&["lis", "--n", "100", "--trials", "40", "--seed", "5", "--samples", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let r = rows(&lines)[0];
    for key in ["N", "trials", "seed", "ks_distance"] {
        assert!(!r[key].is_null(), "{key}");
    }
    assert_eq!(lines.last().unwrap()["seeds"][0], 5);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 41);
}

#[test]
fn reruns_are_identical() {
    let args = ["transition", "--alpha", "0.3", "--n", "16,24", "--x", "2"];
    let strip = |mut v: Vec<Value>| {
        for l in v.iter_mut() {
            l.as_object_mut().unwrap().remove("wall_clock_s");
        }
        v
    };
    assert_eq!(strip(invoke(&args).1), strip(invoke(&args).1));
}

#[test]
fn binary_honours_thread_cap() {
    let exe = env!("CARGO_BIN_EXE_toeplitz-asy");
    let runs: Vec<String> = ["1", "3"]
        .iter()
        .map(|t| {
            let out = Command::new(exe)
                .args(["lis", "--n", "200", "--trials", "64", "--seed", "2", "--quiet"])
                .env("TOEPLITZ_ASY_THREADS", t)
                .output()
                .unwrap();
            assert!(out.status.success());
            String::from_utf8(out.stdout).unwrap().lines().next().unwrap().to_string()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let bad = Command::new(exe).args(["tw", "--s", "0"]).env("TOEPLITZ_ASY_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INPUT));
}
