//! End-to-end tests of the `resgen` binary: subcommand behavior, exit codes
//! and artifact determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn resgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resgen"))
        .args(args)
        .env_remove("RESGEN_EXHAUSTIVE_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("resgen-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gen_is_deterministic() {
    let a = resgen(&["gen", "--family", "universal-d1", "--n", "3", "--p", "24"]);
    let b = resgen(&["gen", "--family", "universal-d1", "--n", "3", "--p", "24"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let report = String::from_utf8_lossy(&a.stderr);
    assert!(report.contains("\"cor\":0"), "report: {report}");
}

#[test]
fn gen_reports_fermat_correction() {
    let out = resgen(&["gen", "--family", "classic-fermat", "--n", "3", "--p", "16"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"cor\":8"));
}

#[test]
fn gen_rejects_invalid_parameters() {
    let out = resgen(&["gen", "--family", "universal-d1", "--n", "0", "--p", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let out = resgen(&["gen", "--family", "classic-fermat", "--n", "3", "--p", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_writes_hdl() {
    let out = resgen(&["gen", "--family", "classic-mersenne", "--n", "3", "--p", "6", "--format", "hdl"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("module classic_mersenne_n3_p6 ("));
    assert!(text.contains("module FA ("));
}

#[test]
fn table_shows_reference_layout() {
    let out = resgen(&["table", "--family", "classic-fermat", "--n", "3", "--p", "16"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("FA HA"), "stage 1 substitution visible: {text}");
    assert!(text.contains("2 FAs"));
}

#[test]
fn table_notes_empty_front_end() {
    let out = resgen(&["table", "--family", "universal-d1", "--n", "3", "--p", "12"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("(empty"));
}

#[test]
fn verify_exhaustive_passes() {
    let out = resgen(&["verify", "--family", "universal-d1", "--n", "2", "--p", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let verdict: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(verdict["passed"], serde_json::json!(true));
    assert_eq!(verdict["evaluated"], serde_json::json!(1024));
}

#[test]
fn verify_random_reports_algorithm() {
    let out = resgen(&[
        "verify", "--family", "bi-residue", "--n", "3", "--p", "32", "--samples", "2000", "--seed", "42",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let verdict: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(verdict["algorithm"], serde_json::json!("splitmix64"));
}

#[test]
fn verify_budget_exceeded_is_usage_error() {
    let out = resgen(&["verify", "--family", "universal-d1", "--n", "2", "--p", "20", "--budget", "1024"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_env_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_resgen"))
        .args(["verify", "--family", "universal-d1", "--n", "2", "--p", "16"])
        .env("RESGEN_EXHAUSTIVE_BUDGET", "256")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_reports_p_minus_4n() {
    let out = resgen(&["compare", "--p", "40", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("saved FAs:                24"));

    let out = resgen(&["compare", "--p", "16", "--n", "4", "--json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["saved_fa"], serde_json::json!(0));
}

#[test]
fn export_json_to_hdl_round_trip() {
    let path = scratch("universal_d1_n2_p8.json");
    let out = resgen(&[
        "gen", "--family", "universal-d1", "--n", "2", "--p", "8",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = resgen(&["export", "--input", path.to_str().unwrap(), "--format", "hdl"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("module universal_d1_n2_p8 ("));
    assert!(text.contains("output wire x_z"));
    // json -> json is byte-stable
    let again = resgen(&["export", "--input", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(std::fs::read(&path).unwrap(), again.stdout);
}

#[test]
fn export_missing_input_is_runtime_error() {
    let out = resgen(&["export", "--input", "/nonexistent/netlist.json", "--format", "hdl"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = resgen(&["gen", "--family", "universal-d1", "--n", "3", "--p", "24", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}
