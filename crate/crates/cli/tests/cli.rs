use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn framedim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framedim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn summary(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Writes the uniform measure on 16 dyadic points and its spectrum.
fn fixtures(dir: &Path) {
    let a = framedim(
        dir,
        &[
            "build-nu",
            "--p",
            "2",
            "--levels",
            "all",
            "--truncate",
            "4",
            "--out",
            "m.json",
        ],
    );
    assert!(a.status.success());
    let b = framedim(
        dir,
        &[
            "enumerate-spectrum",
            "--p",
            "2",
            "--levels",
            "all",
            "--n",
            "4",
            "--out",
            "l.json",
        ],
    );
    assert!(b.status.success());
}

#[test]
fn successful_run_exits_zero_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = framedim(
        dir.path(),
        &[
            "frame-bounds",
            "--measure",
            "m.json",
            "--spectrum",
            "l.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["command"], "frame-bounds");
    assert_eq!(s["status"], "pass");
    assert!((s["result"]["lower"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn failed_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let args = [
        "check-counting-bound",
        "--measure",
        "m.json",
        "--spectrum",
        "l.json",
        "--bessel",
        "1e-6",
        "--trials",
        "10",
    ];
    let out = framedim(dir.path(), &args);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(summary(&out)["status"], "fail");
}

#[test]
fn missing_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = framedim(dir.path(), &["entropy-dim", "--measure", "absent.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));
}

#[test]
fn malformed_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.json"),
        "{\"kind\": \"digit\", \"p\": 1}",
    )
    .unwrap();
    let out = framedim(dir.path(), &["entropy-dim", "--measure", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        framedim(dir.path(), &["no-such-command"]).status.code(),
        Some(1)
    );
    assert_eq!(framedim(dir.path(), &["--version"]).status.code(), Some(0));
}

#[test]
fn limit_violation_names_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = framedim(
        dir.path(),
        &[
            "--max-gram",
            "4",
            "gram",
            "--measure",
            "m.json",
            "--spectrum",
            "l.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_gram"));

    let out = framedim(
        dir.path(),
        &[
            "--max-atoms",
            "8",
            "build-nu",
            "--p",
            "2",
            "--levels",
            "all",
            "--truncate",
            "4",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_atoms"));
}

#[test]
fn csv_output_has_curve_header() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = framedim(
        dir.path(),
        &[
            "--format",
            "csv",
            "entropy-dim",
            "--measure",
            "m.json",
            "--depth",
            "12",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,entropy_ratio"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn csv_rejected_without_curve() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = framedim(
        dir.path(),
        &[
            "--format",
            "csv",
            "gram",
            "--measure",
            "m.json",
            "--spectrum",
            "l.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn plot_data_written_per_curve() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = framedim(
        dir.path(),
        &[
            "--emit-plot-data",
            "plots",
            "beurling-dim",
            "--spectrum",
            "l.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("plots/beurling.csv")).unwrap();
    assert!(csv.starts_with("log_h,log_count\n"));
}

#[test]
fn written_measure_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let text = std::fs::read_to_string(dir.path().join("m.json")).unwrap();
    let doc: framedim::MeasureDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.measure.dim(), 1);
    let out = framedim(
        dir.path(),
        &["entropy-dim", "--measure", "m.json", "--depth", "12"],
    );
    // 16 atoms give ratio min(n, 4)/n; the tail window is n = 10..=12.
    let value = summary(&out)["result"]["value"].as_f64().unwrap();
    assert!((value - 0.4).abs() < 1e-12);
}

#[test]
fn same_seed_same_output() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let args = [
        "--seed",
        "9",
        "check-lemma41",
        "--measure",
        "m.json",
        "--samples",
        "100",
    ];
    let a = framedim(dir.path(), &args);
    let b = framedim(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
