use std::path::Path;
use std::process::{Command, Output};

use pdawa::eval::EvalReport;

fn pdawa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdawa")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn version_and_schema() {
    let out = pdawa(&["--version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));

    let out = pdawa(&["info", "--schema"]);
    assert!(out.status.success());
    let schema: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(schema["properties"]["master_seed"].is_object());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(pdawa(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(pdawa(&["simulate"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_with_one() {
    let out = pdawa(&["detect", "--in", "/nonexistent/wave.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn simulate_detect_render_chain() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let out = pdawa(&["simulate", "--class", "S", "--runs", "2", "--out", s(&sim)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let wave = sim.join("S-00001.csv");
    assert!(wave.exists() && sim.join("S-00001_gt.csv").exists());

    let pulses = dir.path().join("pulses.csv");
    assert!(pdawa(&["detect", "--in", s(&wave), "--out", s(&pulses)]).status.success());
    let text = std::fs::read_to_string(&pulses).unwrap();
    assert!(text.starts_with("time_s,height_v,prominence_v,width_s"));
    assert!(text.lines().count() > 1);

    let png = dir.path().join("awa.png");
    let out = pdawa(&["render", "--in", s(&pulses), "--out", s(&png), "--size", "64", "--ranges", "0.5,1e-6,2e-6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let img = image::open(&png).unwrap();
    assert_eq!((img.width(), img.height()), (64, 64));
}

#[test]
fn eval_gates_external_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut counts = vec![vec![0u64; 6]; 6];
    for (i, row) in counts.iter_mut().enumerate() {
        row[i] = 8;
        row[(i + 1) % 6] = 2;
    }
    let report = EvalReport::from_counts("cnn", counts, 1.5).unwrap();
    let path = dir.path().join("external.json");
    std::fs::write(&path, serde_json::to_string(&report).unwrap()).unwrap();
    let out_dir = dir.path().join("eval");

    let pass = pdawa(&["eval", "--report", s(&path), "--out", s(&out_dir), "--min-accuracy", "75"]);
    assert_eq!(pass.status.code(), Some(0), "{}", String::from_utf8_lossy(&pass.stderr));
    assert!(out_dir.join("confusion.png").exists());
    let written: EvalReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(written.overall_accuracy, report.overall_accuracy);

    let fail = pdawa(&["eval", "--report", s(&path), "--out", s(&out_dir), "--min-accuracy", "90"]);
    assert_eq!(fail.status.code(), Some(1));
}
