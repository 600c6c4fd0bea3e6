use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_designforge"))
        .args(args)
        .env_remove("DESIGNFORGE_PARALLELISM")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    repo().join("fixtures").join(name).to_string_lossy().into_owned()
}

#[test]
fn verify_accepts_fixture() {
    let out = run(&["verify", "--family", "EPA", "--params", "n=12,d=8,m=21", "--input", &fixture("epa_n12_d8_m21.txt")]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("valid EPA(n=12,d=8,m=21)"));
}

#[test]
fn verify_rejects_mutated_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("epa_n12_d8_m21.txt")).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines[1] = lines[0].clone();
    let path = dir.path().join("bad.txt");
    fs::write(&path, lines.join("\n")).unwrap();
    let out = run(&[
        "verify", "--family", "EPA", "--params", "n=12,d=8,m=21", "--input",
        path.to_str().unwrap(), "--format", "json",
    ]);
    assert_eq!(code(&out), 1);
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["report"]["valid"], false);
}

#[test]
fn verify_shape_mismatch_is_usage_error() {
    let out = run(&["verify", "--family", "EPA", "--params", "n=12,d=8,m=20", "--input", &fixture("epa_n12_d8_m21.txt")]);
    assert_eq!(code(&out), 3);
}

#[test]
fn bad_parameters_and_flags_exit_3() {
    assert_eq!(code(&run(&["solve", "--family", "EPA", "--params", "n=3,d=4,m=2"])), 3);
    assert_eq!(code(&run(&["solve", "--family", "XYZ", "--params", "n=3"])), 3);
    assert_eq!(code(&run(&["solve", "--family", "EPA", "--params", "n=6,d=6,m=6", "--algorithm", "dfs"])), 3);
    assert_eq!(code(&run(&["solve", "--family", "EPA", "--params", "n=6,d=6,m=6", "--hyper", "T=-1"])), 3);
    assert_eq!(code(&run(&["solve", "--family", "EPA", "--params", "n=6,d=6,m=6", "--time", "1", "--iters", "5"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn solve_writes_a_verifiable_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("epa.txt");
    let out = run(&[
        "solve", "--family", "EPA", "--params", "n=6,d=6,m=6", "--seed", "1", "--iters", "1000000",
        "--hyper", "T=0.444444", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout(&out));
    let check = run(&["verify", "--family", "EPA", "--params", "n=6,d=6,m=6", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&check), 0);
}

#[test]
fn solve_is_reproducible_under_iteration_budget() {
    let args = ["solve", "--family", "PA", "--params", "N=20,k=5,v=6", "--seed", "9", "--iters", "50000", "--format", "json"];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let json: Value = serde_json::from_str(&a).unwrap();
    assert!(json["elapsed_s"].is_null());
    assert_eq!(json["algorithm"], "sa-const");
}

#[test]
fn unsolved_and_infeasible_exit_2() {
    let out = run(&["solve", "--family", "EPA", "--params", "n=4,d=1,m=2", "--iters", "1000"]);
    assert_eq!(code(&out), 2);
    let out = run(&["solve", "--family", "FR", "--params", "r=3,n=3"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exhausted search tree"));
}

#[test]
fn fixtures_command_passes_all() {
    let out = run(&["fixtures", repo().join("fixtures").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).ends_with("22/22 fixtures pass\n"));
}

#[test]
fn fixtures_command_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(repo().join("fixtures")).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    let target = dir.path().join("epa_n12_d8_m21.txt");
    let text = fs::read_to_string(&target).unwrap();
    fs::write(&target, text.replacen(" 6  5", " 5  6", 1)).unwrap();
    let out = run(&["fixtures", dir.path().to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&out), 1);
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["failed"], 1);
}

#[test]
fn batch_reports_every_run() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let manifest = repo().join("manifests/mixed_smoke.json");
    let out = run(&[
        "batch", "--manifest", manifest.to_str().unwrap(), "--algorithm", "sa-reset",
        "--iters", "200000", "--parallelism", "2", "--output", report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&report).unwrap();
    let json: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["summary"]["solve_rate"], "8/8");
    assert_eq!(json["records"].as_array().unwrap().len(), 8);
    // Record keys keep a fixed order in the written text.
    let first = &text[..text.find("\"error\"").unwrap_or(text.len())];
    let keys = ["\"family\"", "\"params\"", "\"algorithm\"", "\"assignment\"", "\"seed\"", "\"status\"",
        "\"elapsed_s\"", "\"iterations\"", "\"verified\"", "\"solution\""];
    let positions: Vec<usize> = keys.iter().map(|k| first.find(k).expect("key present")).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");
}

#[test]
fn batch_rejects_unsupported_family() {
    let manifest = repo().join("manifests/mixed_smoke.json");
    let out = run(&["batch", "--manifest", manifest.to_str().unwrap(), "--algorithm", "ga", "--iters", "10"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn tune_picks_a_winner() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    fs::write(&manifest, r#"{"family": "EPA", "params": {"n": 5, "d": 4, "m": 5}}"#).unwrap();
    let report = dir.path().join("tune.json");
    let out = run(&[
        "tune", "--family", "EPA", "--algorithm", "sa-const", "--manifest", manifest.to_str().unwrap(),
        "--grid-size", "12", "--init-time", "0.01", "--scale", "4", "--seeds", "2",
        "--report", report.to_str().unwrap(), "--format", "json",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(json["assignment"]["T"].is_number());
    assert!(json["score"].as_f64().unwrap() > 0.0);
    let full: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(full["rounds"].as_array().unwrap().len() >= 2);
}

#[test]
fn tune_rejects_family_mismatch() {
    let manifest = repo().join("manifests/pa_dev.json");
    let out = run(&["tune", "--family", "EPA", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}
