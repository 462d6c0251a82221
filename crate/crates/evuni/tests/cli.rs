//! Black-box tests of the `evuni` binary: exit codes, JSON output shape,
//! and reproducibility of reports.

mod common;

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use common::fixture_path;
use serde_json::Value;

fn evuni(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evuni"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn fixture_arg(name: &str) -> String {
    fixture_path(name).display().to_string()
}

#[test]
fn bound_prints_the_closed_form_values() {
    let cases = [
        (vec!["bound", "2", "2"], "17"),
        (vec!["bound", "2", "2", "--ivanyos"], "257"),
        (vec!["bound", "2", "6"], "81"),
        (vec!["bound", "3", "2"], "82"),
    ];
    for (args, expect) in cases {
        let out = evuni(&args);
        assert_eq!(exit_code(&out), 0, "{args:?}");
        assert_eq!(
            String::from_utf8_lossy(&out.stdout).trim(),
            expect,
            "{args:?}"
        );
    }
}

#[test]
fn bound_rejects_a_trivial_local_dimension() {
    let out = evuni(&["bound", "1", "2"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn analyze_universal_set_exits_zero() {
    let out = evuni(&["analyze", &fixture_arg("ht1.json")]);
    assert_eq!(
        exit_code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    assert_eq!(report["verdict"]["kind"], "UniversalAt");
    assert_eq!(report["verdict"]["register_count"], 1);
    assert_eq!(report["bound_new"], "1");
    let digest = report["input_digest"].as_str().unwrap();
    let bytes = std::fs::read(fixture_path("ht1.json")).unwrap();
    assert_eq!(digest, evuni::report::sha256_hex(&bytes));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verdict:"));
}

#[test]
fn analyze_capped_scan_exits_two() {
    // A controlled-Z on its own: arity 2, so the bound is 17, far beyond
    // the requested cap; the scan must stop undecided.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cz.json");
    write_cz_gateset(&path);
    let out = evuni(&["analyze", path.to_str().unwrap(), "--n-max", "2"]);
    assert_eq!(
        exit_code(&out),
        2,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    assert_eq!(report["verdict"]["kind"], "NotDecided");
    assert_eq!(report["capped_below_bound"], true);
}

#[test]
fn analyze_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(b"{ not json at all").unwrap();
    drop(f);
    let out = evuni(&["analyze", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    assert!(out.stdout.is_empty());
}

#[test]
fn analyze_reports_are_reproducible_modulo_timings() {
    let path = fixture_arg("ht1.json");
    let mut first = stdout_json(&evuni(&["analyze", &path]));
    let mut second = stdout_json(&evuni(&["analyze", &path]));
    first.as_object_mut().unwrap().remove("timings");
    second.as_object_mut().unwrap().remove("timings");
    assert_eq!(first, second);
}

#[test]
fn moments_prints_exact_json_and_a_summary_line() {
    let out = evuni(&["moments", &fixture_arg("pauli1.json"), "1", "2", "--exact"]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["exact"], 4);
    assert_eq!(report["k"], 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("M_4 = 4 (exact)"));
}

#[test]
fn jeandel_build_output_round_trips_through_moments() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("family.json");
    let out = evuni(&["jeandel", "build", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(
        exit_code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    // The emitted file is an ordinary gate set the other commands accept.
    let out = evuni(&["moments", path.to_str().unwrap(), "4", "1", "--exact"]);
    assert_eq!(
        exit_code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    assert!(report["exact"].as_u64().is_some());
}

#[test]
fn jeandel_verify_exit_codes_reflect_the_checks() {
    let out = evuni(&["jeandel", "verify", "2"]);
    assert_eq!(
        exit_code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    assert_eq!(report["all_passed"], true);
    assert_eq!(report["parity_holds"], true);
    assert_eq!(report["compile"]["all_passed"], true);
    assert!(report["witness_skipped"].is_string());

    // k = 3 is not a power of two: the activation parity breaks and the
    // command reports failure.
    let out = evuni(&["jeandel", "verify", "3"]);
    assert_eq!(exit_code(&out), 1);
    let report = stdout_json(&out);
    assert_eq!(report["all_passed"], false);
    assert_eq!(report["parity_holds"], false);
}

/// Write a minimal gate-set file holding only the controlled-Z gate.
fn write_cz_gateset(path: &Path) {
    let text = r#"{
  "d": 2,
  "n": 2,
  "gates": [
    {
      "label": "CZ",
      "matrix": [
        [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]]
      ]
    }
  ]
}"#;
    std::fs::write(path, text).unwrap();
}
