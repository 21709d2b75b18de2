use std::process::Command;

use clap::Parser;
use gaq_cli::{execute, Cli};

fn gaq(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gaq"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn report(args: &[&str]) -> (i32, serde_json::Value) {
    let (code, stdout, _) = gaq(args);
    (code, serde_json::from_str(&stdout).expect("stdout is JSON"))
}

const GRAVITY: &str = "h00 = 0.3*x*y - 0.2*t*z;h1 = 0.2*y;h2 = -0.3*x^2;h3 = 0.4*t";

#[test]
fn galilei_1p1_has_basic_x_v_and_one_dimensional_kernel() {
    let (code, r) = report(&["analyze", "--catalog", "galilei_ext_1p1"]);
    assert_eq!(code, 0);
    assert_eq!(r["classification"]["basic"], serde_json::json!(["v", "x"]));
    assert_eq!(r["kernel"]["dim"], 1);
}

#[test]
fn em_group_invariance_residuals_are_small() {
    let (code, r) = report(&["analyze", "--catalog", "galilei_em_3p1", "--samples", "16"]);
    assert_eq!(code, 0);
    for key in ["lie_theta", "divergence", "left_right", "lie_coframe"] {
        assert!(r["invariance"][key].as_f64().unwrap() < 1e-8, "{key}");
    }
    assert_eq!(r["samples"], 16);
}

#[test]
fn malformed_group_file_exits_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.gdf");
    std::fs::write(&path, "group broken\ncoords x\n").unwrap();
    let (code, _, stderr) = gaq(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error"));
}

#[test]
fn unknown_flags_and_bad_values_exit_with_input_error() {
    assert_eq!(gaq(&["analyze", "--catalog", "no_such_group"]).0, 2);
    assert_eq!(gaq(&["--seed", "x", "su2"]).0, 2);
    assert_eq!(gaq(&["kg", "--sites", "0"]).0, 2);
    assert_eq!(gaq(&["nlsm", "--lambda", "0,0,0"]).0, 2);
    assert_eq!(gaq(&["ads", "--states", "0,0"]).0, 2);
}

#[test]
fn gravity_trajectory_does_not_depend_on_mass() {
    let dir = tempfile::tempdir().unwrap();
    let run = |m: &str| {
        let csv = dir.path().join(format!("m{m}.csv"));
        let args = [
            "scenario",
            "gravity",
            "--field-text",
            GRAVITY,
            "--state",
            "0.1,0.2,0,0.3,0,0",
            "--mass",
            m,
        ];
        let mut full: Vec<&str> = args.to_vec();
        let path = csv.to_str().unwrap().to_string();
        full.extend(["--csv", &path]);
        assert_eq!(gaq(&full).0, 0);
        std::fs::read(&csv).unwrap()
    };
    assert_eq!(run("1"), run("7"));
}

#[test]
fn gravity_report_names_a_unique_convention() {
    let (code, r) = report(&["scenario", "gravity", "--field-text", GRAVITY]);
    assert_eq!(code, 0);
    assert_eq!(r["gem"]["unique"], true);
    assert_eq!(r["gem"]["samples"], 64);
}

#[test]
fn em_scenario_reports_the_gyration_period() {
    let (code, r) = report(&[
        "scenario",
        "em",
        "--field-text",
        "A1 = -0.5*y; A2 = 0.5*x",
        "--state",
        "1,0,0,0,1,0",
        "--t-final",
        "7",
    ]);
    assert_eq!(code, 0);
    let period = r["gyration_period"].as_f64().unwrap();
    assert!((period - 2.0 * std::f64::consts::PI).abs() < 1e-5 * period);
}

#[test]
fn scenario_kind_must_match_the_field_family() {
    assert_eq!(gaq(&["scenario", "em", "--field-text", GRAVITY]).0, 2);
}

#[test]
fn jacobi_substitution_decides_pass_or_fail() {
    let (ok, r) = report(&["jacobi", "--builtin", "gravity", "--substitute", "g=m*c"]);
    assert_eq!(ok, 0);
    assert_eq!(r["residuals_after_substitution"], serde_json::json!([]));
    let (bad, _) = report(&["jacobi", "--builtin", "gravity", "--substitute", "g=2*m*c"]);
    assert_eq!(bad, 1);
}

#[test]
fn reports_and_tables_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let json = dir.path().join(format!("r{i}.json"));
        let csv = dir.path().join(format!("r{i}.csv"));
        let (code, stdout, _) = gaq(&[
            "nlsm",
            "--seed",
            "5",
            "--t-final",
            "0.2",
            "--json",
            json.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let written = std::fs::read_to_string(&json).unwrap();
        assert_eq!(stdout, written);
        outputs.push((written, std::fs::read(&csv).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn kg_su2_and_ads_pass_with_defaults() {
    for cmd in [&["kg", "--sites", "12"][..], &["su2"], &["ads"]] {
        let (code, r) = report(cmd);
        assert_eq!(code, 0, "{cmd:?}");
        assert_eq!(r["passed"], true);
    }
}

#[test]
fn ads_printed_reading_is_a_residual_failure() {
    assert_eq!(report(&["ads", "--reading", "printed"]).0, 1);
}

#[test]
fn selftest_filter_runs_only_the_matching_item() {
    let cli = Cli::parse_from(["gaq", "selftest", "--filter", "jacobi"]);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(execute(&cli, &mut out, &mut err), 0);
    let text = String::from_utf8(out).unwrap();
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
            .count(),
        1
    );
    assert!(text.contains("jacobi-equivalence"));
}

#[test]
fn selftest_filter_without_matches_warns_and_passes() {
    let cli = Cli::parse_from(["gaq", "selftest", "--filter", "nomatch"]);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(execute(&cli, &mut out, &mut err), 0);
    assert!(String::from_utf8(err).unwrap().contains("warning"));
}
