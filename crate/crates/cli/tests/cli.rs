//! End-to-end tests of the binary: golden outputs, exit codes, JSON
//! round-trips and file output.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quiver-dt"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

#[test]
fn dt_table_matches_golden() {
    let out = run(&["dt", data("one_loop.toml").to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), golden("one_loop_dt.table.golden"));
}

#[test]
fn local_json_matches_golden() {
    let out = run(&[
        "local",
        data("local_one_loop.toml").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), golden("local_one_loop.json.golden"));
}

#[test]
fn framed_csv_matches_golden() {
    let out = run(&[
        "framed",
        data("framed_point.toml").to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), golden("framed_point.csv.golden"));
}

#[test]
fn dt_json_round_trips() {
    let out = run(&[
        "dt",
        data("kronecker3.toml").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let result = doc.get("result").unwrap();
    // parse(emit(x)) = x: deserialize into the engine type and re-serialize
    let parsed: quiver_dt::dt::DTResult = serde_json::from_value(result.clone()).unwrap();
    let re_emitted = serde_json::to_value(&parsed).unwrap();
    assert_eq!(&re_emitted, result);
}

#[test]
fn table_and_json_carry_identical_polynomial_data() {
    let json_out = run(&[
        "dt",
        data("kronecker3.toml").to_str().unwrap(),
        "--format",
        "json",
    ]);
    let table_out = run(&["dt", data("kronecker3.toml").to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&json_out)).unwrap();
    let table_text = stdout(&table_out);
    // the (1,1) invariant is v^(-2) + 1 + v^2 in both renderings
    let omega = &doc["result"]["dt"][0]["omega"]["num"];
    assert_eq!(omega["-2"], "1");
    assert_eq!(omega["0"], "1");
    assert_eq!(omega["2"], "1");
    assert!(table_text.contains("v^-2 + 1 + v^2"), "{table_text}");
}

#[test]
fn json_config_is_accepted() {
    let out = run(&["dt", data("two_loop.json").to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("v^2"));
}

#[test]
fn trivial_stability_on_asymmetric_quiver_exits_2() {
    let out = run(&["dt", data("kronecker2_no_theta.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("symmetry"), "{}", stderr(&out));
}

#[test]
fn normalized_framed_series_with_odd_framing_exits_2() {
    let out = run(&[
        "framed",
        data("framed_point_odd.toml").to_str().unwrap(),
        "--normalized",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("even framing"), "{}", stderr(&out));
}

#[test]
fn unknown_config_key_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "vertices = [\"x\"]\narrows = []\nbox = [2]\nwhat = 1\n").unwrap();
    let out = run(&["dt", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn theta_without_mu_exits_1_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no_mu.toml");
    std::fs::write(
        &path,
        "vertices = [\"a\", \"b\"]\narrows = [[\"a\", \"b\", 2]]\nbox = [2, 2]\ntheta = { a = 1, b = -1 }\n",
    )
    .unwrap();
    let out = run(&["dt", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("slope required with stability"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn non_generic_stability_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nongeneric.toml");
    // A2 quiver with equal weights: (1,0) and (0,1) share slope 1 but pair to -1
    std::fs::write(
        &path,
        "vertices = [\"a\", \"b\"]\narrows = [[\"a\", \"b\", 1]]\nbox = [1, 1]\ntheta = { a = 1, b = 1 }\nmu = \"1\"\n",
    )
    .unwrap();
    let out = run(&["dt", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("generic"), "{}", stderr(&out));
}

#[test]
fn check_command_passes_strict_on_kronecker() {
    let out = run(&[
        "check",
        data("kronecker3.toml").to_str().unwrap(),
        "--strict",
        "--ring-audit",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("integrality"));
    assert!(text.contains("sym_reconstruction"));
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn oracle_rows_all_match() {
    let out = run(&[
        "oracle",
        data("kronecker3.toml").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc["oracle"].as_array().unwrap();
    assert!(!rows.is_empty());
    for row in rows {
        assert_eq!(row["match"], serde_json::Value::Bool(true), "{row}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("result.json");
    let out = run(&[
        "dt",
        data("one_loop.toml").to_str().unwrap(),
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(doc["result"]["dt"][0]["omega"]["num"]["1"], "1");
}

#[test]
fn dt_threads_env_is_accepted() {
    let out = bin()
        .args(["dt", data("one_loop.toml").to_str().unwrap()])
        .env("DT_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn nullcone_rejects_asymmetric_quiver() {
    let out = run(&["nullcone", data("kronecker2_no_theta.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn betti_reports_no_stable_points_for_vanishing_dt() {
    let out = run(&["betti", data("one_loop.toml").to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("no stable points"), "{text}");
}
