use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

const SMALL: [&str; 4] = ["--n-radial", "16", "--n-angular", "32"];

fn awlift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awlift"))
        .args(args)
        .args(SMALL)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn check_exit_codes_follow_the_conditions() {
    let cases = [
        ("enneper_half.json", 0),
        ("identity.json", 0),
        ("power_08.json", 0),
        ("atanh.json", 2),
        ("enneper.json", 3),
    ];
    for (name, code) in cases {
        let map = fixture(name);
        let out = awlift(&["check", "--map", &map]);
        assert_eq!(out.status.code(), Some(code), "{name}");
        let summary = json(&out);
        assert!(summary["sup_t"].is_f64());
        assert!(summary["C_estimate"].is_f64());
    }
}

#[test]
fn check_writes_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("field.csv");
    let summary = dir.path().join("summary.json");
    let map = fixture("enneper_half.json");
    let out = awlift(&[
        "check",
        "--map",
        &map,
        "--report",
        report.to_str().unwrap(),
        "--out",
        summary.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&report).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("re,im,sigma,abs_schwarzian,curv_density,margin_t,grad_sigma_norm")
    );
    assert_eq!(lines.count(), 16 * 32 + 1);
    let saved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(saved, json(&out));
    assert!((saved["sup_t"].as_f64().unwrap() - 0.5).abs() < 1e-3);
}

#[test]
fn mesh_requires_out() {
    let map = fixture("identity.json");
    for cmd in ["mesh", "extend"] {
        let out = awlift(&[cmd, "--map", &map]);
        assert_eq!(out.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&out.stderr).contains("--out"));
    }
}

#[test]
fn extend_writes_both_sheets() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("both.obj");
    let map = fixture("enneper_half.json");
    let out = awlift(&["extend", "--map", &map, "--out", obj.to_str().unwrap()]);
    assert!(out.status.success());
    let summary = json(&out);
    assert_eq!(summary["dropped"], 1);
    let text = std::fs::read_to_string(&obj).unwrap();
    let vertices = text.lines().filter(|l| l.starts_with("v ")).count();
    assert_eq!(vertices, 2 * (16 * 32 + 1) - 1);
    let csv = std::fs::read_to_string(obj.with_extension("csv")).unwrap();
    assert_eq!(
        csv.lines().filter(|l| l.contains(",exterior,")).count(),
        16 * 32
    );
}

#[test]
fn qc_and_compare_classical_on_power_map() {
    let map = fixture("power_08.json");
    let out = awlift(&["qc", "--map", &map, "--samples", "100"]);
    assert!(out.status.success());
    let s = json(&out);
    assert!(s["max_ratio"].as_f64().unwrap() <= 2.125 * 1.02);
    let out = awlift(&["compare-classical", "--map", &map, "--samples", "50"]);
    assert!(out.status.success());
    assert!(json(&out)["max_deviation"].as_f64().unwrap() < 1e-7);
}

#[test]
fn compare_classical_rejects_harmonic_maps() {
    let map = fixture("enneper_half.json");
    let out = awlift(&["compare-classical", "--map", &map]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn convexity_reports_critical_point() {
    let map = fixture("enneper_half.json");
    let out = awlift(&["convexity", "--map", &map, "--samples", "5"]);
    assert!(out.status.success());
    let s = json(&out);
    assert_eq!(s["critical_point"]["status"], "found");
    assert!(s["min_second_difference"].as_f64().unwrap() >= -1e-7);
}

#[test]
fn inline_json_and_bad_input() {
    let out = awlift(&["check", "--map", r#"{"h":"z"}"#]);
    assert!(out.status.success());
    let out = awlift(&["check", "--map", r#"{"h":"z+"}"#]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let out = awlift(&["check", "--map", "/nonexistent/map.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical() {
    let map = fixture("enneper_half.json");
    let run = || awlift(&["qc", "--map", &map, "--samples", "50", "--seed", "7"]).stdout;
    assert_eq!(run(), run());
}
