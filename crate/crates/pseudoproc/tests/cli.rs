//! The command-line front end, driven through the built binary.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudoproc")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn complex(v: &Value) -> (f64, f64) {
    (v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

fn table(v: &Value, m: i64) -> (f64, f64) {
    let row = v.as_array().unwrap().iter().find(|r| r["m"] == m).unwrap();
    complex(&row["value"])
}

#[test]
fn arcsine_density_at_midpoint() {
    let v = json(&["marginal", "--order", "2", "--t", "1", "--s", "0.5"]);
    let d = v["result"]["density"].as_f64().unwrap();
    assert!((d - 2.0 / PI).abs() < 1e-14, "{d}");
    assert_eq!(v["config"]["subcommand"], "marginal");
}

#[test]
fn quartic_roots_match_the_worked_example() {
    let v = json(&["roots", "--order", "4"]);
    let r = &v["result"];
    assert_eq!(r["kappa"], -1);
    let close = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14;
    let theta_j: Vec<(f64, f64)> = r["theta_J"].as_array().unwrap().iter().map(complex).collect();
    let a: Vec<(f64, f64)> = r["A"].as_array().unwrap().iter().map(complex).collect();
    let b: Vec<(f64, f64)> = r["B"].as_array().unwrap().iter().map(complex).collect();
    let theta_k: Vec<(f64, f64)> = r["theta_K"].as_array().unwrap().iter().map(complex).collect();
    // A_j = θ_j/√2 for θ_j = e^{∓iπ/4}; B_k = e^{∓iπ/4}/√2 for θ_k = −θ_j.
    for (t, c) in theta_j.iter().zip(&a) {
        assert!(close(*c, (t.0 * FRAC_1_SQRT_2, t.1 * FRAC_1_SQRT_2)), "{t:?} {c:?}");
    }
    for (t, c) in theta_k.iter().zip(&b) {
        assert!(close(*c, (-t.0 * FRAC_1_SQRT_2, -t.1 * FRAC_1_SQRT_2)), "{t:?} {c:?}");
    }
    assert!(close(table(&r["alpha"], 0), (1.0, 0.0)) && close(table(&r["alpha"], -2), (1.0, 0.0)));
    assert!(close(table(&r["alpha"], -1), (SQRT_2, 0.0)));
    assert!(close(table(&r["beta"], 0), (1.0, 0.0)) && close(table(&r["beta"], -2), (1.0, 0.0)));
    assert!(close(table(&r["beta"], -1), (-SQRT_2, 0.0)));
}

#[test]
fn invalid_sign_is_a_usage_error_citing_the_even_constraint() {
    let out = run(&["roots", "--order", "4", "--kappa", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("even-N constraint"));
    assert_eq!(run(&["kernel", "--order", "5"]).status.code(), Some(2));
    assert_eq!(run(&["transform", "--level", "2", "--lambda", "1"]).status.code(), Some(2));
}

#[test]
fn odd_orders_print_the_formal_banner() {
    let out = run(&["kernel", "--order", "3", "--kappa", "-1", "--x", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("formal"));
    assert!(run(&["kernel", "--x", "0.2"]).stderr.is_empty());
}

#[test]
fn density_csv_has_the_documented_columns() {
    let out = run(&["density", "--order", "2", "--s", "0.5", "--grid-h", "0.5", "--grid-L", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,x,value,flags"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    // Symmetric about x = 0 at s = t/2 for N = 2.
    let value = |r: &str| r.split(',').nth(2).unwrap().parse::<f64>().unwrap();
    assert!((value(rows[0]) - value(rows[4])).abs() < 1e-12);
}

#[test]
fn level_one_transform_matches_the_oracle_output() {
    let t = json(&["transform", "--level", "1", "--lambda", "1", "--mu", "0.5", "--nu", "1"]);
    let o = json(&["oracle", "--level", "3", "--lambda", "1", "--mu", "0.5", "--nu", "1"]);
    assert_eq!(complex(&t["result"]["value"]), complex(&o["result"]["E_closed"]));
    for key in ["E_n", "E_closed", "rel_err", "leakage", "budget"] {
        assert!(!o["result"][key].is_null(), "{key}");
    }
}

#[test]
fn output_file_receives_the_document() {
    let path = std::env::temp_dir().join(format!("pseudoproc-cli-{}.json", std::process::id()));
    let out = run(&["marginal", "--s", "0.25", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let _ = std::fs::remove_file(&path);
    let want = 1.0 / (PI * (0.25f64 * 0.75).sqrt());
    assert!((v["result"]["density"].as_f64().unwrap() - want).abs() < 1e-14);
}
