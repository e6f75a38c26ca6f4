use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dynspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynspec")).args(args).output().unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("dynspec-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn dimension_of_c2_brackets_the_reference() {
    let o = dynspec(&["dimension", "--preset", "c2", "--depth", "8"]);
    assert!(o.status.success());
    let v = json_out(&o);
    let (lo, hi) = (v["enclosure"]["lower"].as_f64().unwrap(), v["enclosure"]["upper"].as_f64().unwrap());
    assert!(lo <= 0.531280506 && 0.531280506 <= hi);
}

#[test]
fn usage_errors_exit_2_with_json() {
    for args in [
        &["dimension", "--preset", "nope"][..],
        &["dimension", "--file", "/nonexistent/k.json"],
        &["sumset", "--preset", "c3", "--certify", "1"],
        &["spectrum", "scan", "--preset", "full10"],
        &["dimension", "--preset", "c2", "--depth", "0"],
    ] {
        let o = dynspec(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let e: Value = serde_json::from_slice(&o.stderr).unwrap();
        assert_eq!(e["error"], "usage");
    }
    assert_eq!(dynspec(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn refusal_is_a_report_not_an_error() {
    let o = dynspec(&["sumset", "--preset", "c3", "--depth", "4", "--certify", "auto"]);
    assert!(o.status.success());
    let v = json_out(&o);
    assert_eq!(v["certified"], false);
    assert_eq!(v["certificate"]["reason"], "thickness");
}

#[test]
fn c4_sum_is_certified() {
    let v = json_out(&dynspec(&["sumset", "--preset", "c4", "--depth", "4", "--certify", "auto"]));
    assert_eq!(v["certified"], true);
    assert_eq!(v["cover_has_no_gap_inside"], true);
}

#[test]
fn surgery_check_is_deterministic() {
    let a = dynspec(&["surgery-check", "--config", &config("surgery-full2.json")]);
    let b = dynspec(&["--threads", "2", "spectrum", "surgery-check", "--config", &config("surgery-full2.json")]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json_out(&a);
    assert_eq!(v["all_hold"], true);
    assert!(v["instances"].as_u64().unwrap() >= 100);
}

#[test]
fn scan_writes_csv_and_svg_under_the_out_dir() {
    let d = scratch("scan");
    let o = Command::new(env!("CARGO_BIN_EXE_dynspec"))
        .args(["spectrum", "scan", "--preset", "full12", "--max-period", "4", "--out", "s.csv", "--svg", "s.svg"])
        .env("DYNSPEC_OUT_DIR", &d)
        .output()
        .unwrap();
    assert!(o.status.success());
    let csv = std::fs::read_to_string(d.join("s.csv")).unwrap();
    assert!(csv.lines().count() > 2);
    assert!(std::fs::read_to_string(d.join("s.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn kalpha_demo_reports_the_refusal() {
    let d = scratch("demo");
    let o = Command::new(env!("CARGO_BIN_EXE_dynspec"))
        .args(["demo", "main-theorem", "--config", &config("kalpha04.json"), "--out", "r.json"])
        .env("DYNSPEC_OUT_DIR", &d)
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(v["certified"], false);
    assert_eq!(v["failed_stage"], 5);
    assert!(d.join("kalpha-0.4-stage1.json").exists());
}

#[test]
fn documented_invocations() {
    let third = 2f64.ln() / 3f64.ln();
    for (p, pad) in [("kalpha:1/3", 1e-12), ("kalpha:0.333333", 1e-6)] {
        let v = json_out(&dynspec(&["dimension", "--preset", p, "--depth", "6"]));
        let (lo, hi) = (v["enclosure"]["lower"].as_f64().unwrap(), v["enclosure"]["upper"].as_f64().unwrap());
        assert!(lo - pad <= third && third <= hi + pad, "{p}");
    }
    let v = json_out(&dynspec(&["sumset", "--preset", "c4", "--op", "plus", "--depth", "5", "--certify", "auto"]));
    assert_eq!(v["certified"], true);
    let v = json_out(&dynspec(&["spectrum", "scan", "--preset", "full12", "--observable", "cf", "--max-period", "6"]));
    assert_eq!(v["min"]["exact"], "sqrt(5)");
}
