//! End-to-end tests running the built binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn qturn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qturn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("qturn_test_{}_{name}", std::process::id()));
    p
}

#[test]
fn word_command_reports_the_example() {
    let out = qturn(&["word", "URDRURDLDL", "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["symbolic_index"], 0);
    assert_eq!(v["sector_types"], "HEHIH");
    assert_eq!(v["allowed"], true);
    assert_eq!(v["d"], 5);
    assert_eq!(v["conservative"], false);
}

#[test]
fn word_command_text_output() {
    let out = qturn(&["word", "urdl"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("index:         0"), "{text}");
    assert!(text.contains("sectors:       HH"), "{text}");
}

#[test]
fn word_command_rejects_unallowed_with_exit_1() {
    let out = qturn(&["word", "UU"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("not allowed"), "{text}");
}

#[test]
fn parse_error_is_usage_error_with_column() {
    let out = qturn(&["word", "UR?L"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("column 3"), "{err}");
}

#[test]
fn verify_writes_passing_report() {
    let path = tmp("verify.json");
    let out = qturn(&[
        "verify",
        "URDL",
        "--samples",
        "384",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["symbolic_index"], 0);
    assert_eq!(report["numeric_index"], 0);
    assert_eq!(report["word_recovered"], "URDL");
    assert_eq!(report["config"]["curves"]["samples"], 384);
    assert_eq!(report["format_version"], "qturn-report/1");
    std::fs::remove_file(&path).ok();
}

#[test]
fn verify_rejects_d1_word() {
    let out = qturn(&["verify", "UR"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["validity"]["realizable"], false);
}

#[test]
fn verify_reuses_embedded_config_from_a_report() {
    let path = tmp("reuse.json");
    let out = qturn(&[
        "verify",
        "URDL",
        "--samples",
        "384",
        "--seed",
        "9",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    // feed the report back as the config
    let out = qturn(&["verify", "URDL", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["curves"]["samples"], 384);
    assert_eq!(report["config"]["seed"], 9);
    std::fs::remove_file(&path).ok();
}

#[test]
fn sweep_d2_all_pass() {
    let out = qturn(&["verify", "--sweep", "2", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sweep_d"], 2);
    assert_eq!(v["total"], 2); // URDL and DRUL are the only index != 1 classes
    assert_eq!(v["passed"], 2);
    assert_eq!(v["outside_theory"], 0);
}

#[test]
fn sweep_with_index_one_flags_outside_theory() {
    let out = qturn(&["verify", "--sweep", "2", "--include-index-one", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["total"], 10);
    assert_eq!(v["outside_theory"], 8);
    assert_eq!(v["passed"], 10, "outside-theory words are flagged, not failed");
}

#[test]
fn render_emits_svg_with_sector_rays_and_deterministic_csv() {
    let svg_path = tmp("render.svg");
    let args = [
        "render",
        "URDRURDLDL",
        "--out",
        svg_path.to_str().unwrap(),
        "--grid",
        "8",
        "--seed",
        "7",
    ];
    let out = qturn(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg.matches(r#"class="sector-ray""#).count(), 5);
    assert!(svg.contains("polyline"));
    let csv_path = svg_path.with_extension("csv");
    let csv1 = std::fs::read(&csv_path).unwrap();
    let lines = csv1.split(|&b| b == b'\n').filter(|l| !l.is_empty()).count();
    assert_eq!(lines, 1 + 8 * 8, "header plus 8x8 grid");

    // rerun: byte-identical outputs
    let out = qturn(&args);
    assert_eq!(out.status.code(), Some(0));
    let csv2 = std::fs::read(&csv_path).unwrap();
    assert_eq!(csv1, csv2);
    let svg2 = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg, svg2);
    std::fs::remove_file(&svg_path).ok();
    std::fs::remove_file(&csv_path).ok();
}

#[test]
fn usage_error_on_missing_arguments() {
    let out = qturn(&["verify"]);
    assert_eq!(out.status.code(), Some(2));
}
