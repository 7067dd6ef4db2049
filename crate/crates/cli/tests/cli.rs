//! End-to-end tests of the binary: argument handling, exit codes, JSON
//! reports, CSV layout and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqed-pom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, envs: &[(&str, &str)], args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cqed-pom"));
    cmd.current_dir(dir).args(args);
    for (key, value) in envs {
        cmd.env(key, value);
    }
    cmd.output().expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("valid json")
}

#[test]
fn idp_reports_the_inconclusive_probability() {
    let json = stdout_json(&run(&["idp", "--theta", "0.5236"]));
    let p = json["p_inconclusive"].as_f64().unwrap();
    assert!((p - 0.5).abs() < 1e-4);
    assert!(json["pom_probs"].is_array());
    assert!(json["pulse_probs"].is_array());
    assert!(json["paper_interval"].is_array());
}

#[test]
fn idp_accepts_degrees() {
    let json = stdout_json(&run(&["idp", "--theta", "22.5", "--degrees"]));
    let p = json["p_inconclusive"].as_f64().unwrap();
    assert!((p - 0.5f64.sqrt()).abs() < 1e-9);
}

#[test]
fn idp_rejects_out_of_range_angles() {
    let output = run(&["idp", "--theta", "1.0"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("theta"));
}

#[test]
fn idp_sampling_matches_exact_statistics() {
    let json = stdout_json(&run(&[
        "idp", "--theta", "0.3927", "--samples", "100000", "--seed", "7",
    ]));
    let tables = json["sampled_frequencies"].as_array().unwrap();
    let exact = json["pom_probs"].as_array().unwrap();
    for (state, table) in tables.iter().enumerate() {
        for (k, entry) in table.as_array().unwrap().iter().enumerate() {
            let freq = entry[1].as_f64().unwrap();
            let expected = exact[state][k].as_f64().unwrap();
            assert!((freq - expected).abs() < 0.01);
        }
    }

    // Same seed, same counts.
    let again = stdout_json(&run(&[
        "idp", "--theta", "0.3927", "--samples", "100000", "--seed", "7",
    ]));
    assert_eq!(json, again);
}

#[test]
fn superadd_reports_the_ideal_gain() {
    let json = stdout_json(&run(&["superadd", "--impl", "usa"]));
    assert!((json["sqcg"].as_f64().unwrap() - 0.0391131).abs() < 1e-6);
    assert!((json["I2"].as_f64().unwrap() - 1.3690684).abs() < 1e-6);
    assert!((json["C1"].as_f64().unwrap() - 0.6454211).abs() < 1e-6);
    assert_eq!(json["impl"], "usa");
    assert_eq!(json["conditional"].as_array().unwrap().len(), 4);
}

#[test]
fn superadd_with_delay_uses_the_pulse_program() {
    let json = stdout_json(&run(&["superadd", "--impl", "pulse", "--delta", "0.05"]));
    assert!((json["sqcg"].as_f64().unwrap() - 0.0132200).abs() < 1e-6);
}

#[test]
fn superadd_blind_detector_kills_the_information() {
    let json = stdout_json(&run(&["superadd", "--impl", "usa", "--p", "0.5", "--q", "0.5"]));
    assert!(json["I2"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn superadd_delta_requires_the_pulse_realization() {
    let output = run(&["superadd", "--impl", "usa", "--delta", "0.05"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn detection_sweep_grid_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let out_str = out.to_str().unwrap();
    let first = run(&[
        "sweep", "detection", "--impl", "usa-prime", "--steps", "11", "--threads", "2",
        "--out", out_str,
    ]);
    assert!(first.status.success());
    let first_bytes = std::fs::read(&out).unwrap();
    let text = String::from_utf8(first_bytes.clone()).unwrap();
    assert!(text.starts_with("p,q,I2,C1,G,G0\n"));
    assert_eq!(text.lines().count(), 1 + 11 * 11);

    // Re-running with a different thread count produces identical bytes.
    let second = run(&[
        "sweep", "detection", "--impl", "usa-prime", "--steps", "11", "--threads", "1",
        "--out", out_str,
    ]);
    assert!(second.status.success());
    assert_eq!(std::fs::read(&out).unwrap(), first_bytes);
}

#[test]
fn delay_sweep_against_the_short_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("delay.csv");
    let output = run(&[
        "sweep", "delay", "--max", "0.2", "--steps", "41", "--delay-ref", "t2",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("delta,sqcg"));
    assert_eq!(lines.next(), Some("0,0.0391131"));
    assert_eq!(text.lines().count(), 42);
}

#[test]
fn delay_sweep_rejects_delays_beyond_the_short_gate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("delay.csv");
    let output = run(&[
        "sweep", "delay", "--max", "0.2", "--steps", "41", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("second cavity interaction"));
    assert!(!out.exists());
}

#[test]
fn bare_output_names_honor_the_output_directory_variable() {
    let dir = tempfile::tempdir().unwrap();
    let work = tempfile::tempdir().unwrap();
    let output = run_in(
        work.path(),
        &[("CQED_POM_OUT_DIR", dir.path().to_str().unwrap())],
        &["sweep", "delay", "--max", "0.05", "--steps", "3", "--out", "d.csv"],
    );
    assert!(output.status.success());
    assert!(dir.path().join("d.csv").exists());
    assert!(!work.path().join("d.csv").exists());
}

#[test]
fn verify_reports_the_documented_red_checks() {
    let output = run(&["verify", "--json"]);
    // Three reference checks are red by design, so the command signals it.
    assert_eq!(output.status.code(), Some(1));
    let checks: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let red: Vec<&str> = checks
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| !c["passed"].as_bool().unwrap())
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(red, vec!["AC2a", "AC4", "AC9a"]);
    for check in checks.as_array().unwrap() {
        if !check["passed"].as_bool().unwrap() {
            assert!(check["note"].as_str().unwrap().len() > 40);
        }
    }
}

#[test]
fn verify_text_mode_prints_one_line_per_check() {
    let output = run(&["verify"]);
    assert_eq!(output.status.code(), Some(1));
    let text = String::from_utf8_lossy(&output.stdout);
    for id in ["AC1", "AC2a", "AC2b", "AC3", "AC4", "AC5", "AC6", "AC7", "AC8",
               "AC9a", "AC9b", "AC10a", "AC10e", "AC11", "AC12"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "missing {id}");
    }
    assert!(text.contains("checks passed"));
}
