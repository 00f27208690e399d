use std::process::{Command, Output};

use serde_json::Value;

fn modflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modflow")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (bool, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = modflow(&all);
    let v: Value = serde_json::from_slice(&out.stdout).expect("JSON on stdout");
    (out.status.success(), v)
}

#[test]
fn expand_lehner_sqrt2() {
    let (ok, v) = json(&["expand", "--system", "lehner", "--value", "sqrt(2)"]);
    assert!(ok);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["payload"]["expansion"]["period"], serde_json::json!(["2-", "1+"]));
    assert_eq!(v["payload"]["expansion"]["preperiod"], serde_json::json!([]));
    assert_eq!(v["payload"]["round_trip"], true);
}

#[test]
fn expand_farey_minus_one() {
    let (ok, v) = json(&["expand", "--system", "farey", "--value=-1"]);
    assert!(ok);
    assert_eq!(v["payload"]["expansion"]["period"], serde_json::json!(["2-"]));
}

#[test]
fn out_of_domain_is_an_error_document() {
    let (ok, v) = json(&["expand", "--system", "lehner", "--value", "3"]);
    assert!(!ok);
    assert_eq!(v["status"], "error");
    assert_eq!(v["payload"]["error"], "OutOfDomain");
    assert!(!v["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn convert_periodic_rcf() {
    let (ok, v) = json(&["convert", "--to", "farey", "--rcf", "1;2,..."]);
    assert!(ok);
    assert_eq!(v["payload"]["value"], "sqrt(2)");
    assert_eq!(v["payload"]["converted"]["period"], serde_json::json!(["1+", "2-"]));
    assert_eq!(v["payload"]["agrees"], true);
}

#[test]
fn geodesic_report() {
    let (ok, v) = json(&["geodesic", "--backward", "1-sqrt(2)", "--forward", "sqrt(2)"]);
    assert!(ok);
    let p = &v["payload"];
    assert!(p["cell"].is_object());
    assert!(p["return_time"].as_f64().unwrap() > 0.0);
    assert!(p["runs"].is_object());
}

#[test]
fn verify_run_decoding_and_unknown_suite() {
    let (ok, v) = json(&["verify", "--suite", "theorem1", "--samples", "81"]);
    assert!(ok);
    assert_eq!(v["payload"]["passed"], true);
    assert_eq!(v["payload"]["checks"][0]["passed"], 81);

    let (ok, v) = json(&["verify", "--suite", "bogus"]);
    assert!(!ok);
    assert_eq!(v["payload"]["error"], "UnknownSuite");
}

#[test]
fn plain_output_and_usage_errors() {
    let out = modflow(&["expand", "--system", "rcf", "--value", "7/5"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("status: ok"));
    let out = modflow(&["expand", "lehner"]);
    assert_eq!(out.status.code(), Some(2));
}
