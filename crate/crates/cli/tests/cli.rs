//! End-to-end runs of the binary on small configurations.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const FISHER: &str = "[model]\nkind = fisher\n[grid]\nx_min = -60\nx_max = 60\ndx = 0.25\n\
                      [time]\ndt = 0.05\nt_end = 8\nsnapshot_every = 1\n";

const LOGISTIC: &str = "[model]\nkind = shifted_logistic\ntau = 0\nc = 1.5\n\
                        [grid]\nx_min = -60\nx_max = 80\ndx = 0.25\n\
                        [time]\ndt = 0.025\nt_end = 12\nsnapshot_every = 1\n\
                        [ic]\nkind = xi\nd = 5\n\
                        [analysis]\nt_min = 6\nsweep_param = model.c\nsweep_values = 0, 0.5, 1, 1.5\n";

fn run(dir: &Path, cfg: &str, args: &[&str]) -> Output {
    let path = dir.join("run.cfg");
    fs::write(&path, cfg).unwrap();
    Command::new(env!("CARGO_BIN_EXE_propagate"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .env_remove("PROPAGATE_JOBS")
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_hashed(v: &Value) {
    let h = v["config_hash"].as_str().expect("config_hash");
    assert_eq!(h.len(), 64);
}

#[test]
fn speed_prints_fisher_values_and_writes_the_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), FISHER, &["speed", "--side", "plus"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "c_star=2.000000, nu_star=1.000000");
    let csv = fs::read_to_string(tmp.path().join("out/speed_plus.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("nu,lambda,phi"));
    assert!(csv.lines().count() > 10);
    let meta = json(&tmp.path().join("out/speed_plus.json"));
    assert_hashed(&meta);
    assert_eq!(meta["config"]["derived.c_star_prediction"], "2");
}

#[test]
fn simulate_writes_long_format_and_meta() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), FISHER, &["simulate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("out/trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,x,u1"));
    // 9 snapshots of 481 points
    assert_eq!(csv.lines().count(), 1 + 9 * 481);
    let meta = json(&tmp.path().join("out/meta.json"));
    assert_hashed(&meta);
    assert_eq!(meta["dt"], 0.05);
    assert_eq!(meta["grid"]["n"], 481);
    assert_eq!(meta["monitor"]["box_ok"], true);
    assert_eq!(meta["model"]["kind"], "fisher");
}

#[test]
fn verify_records_every_clause() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), LOGISTIC, &["verify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&tmp.path().join("out/verdicts.json"));
    assert_hashed(&v);
    let records = v["verdicts"].as_array().unwrap();
    assert_eq!(records.len(), 4);
    let clauses: Vec<&str> = records.iter().map(|r| r["clause"].as_str().unwrap()).collect();
    assert_eq!(clauses, ["spreading", "annihilation", "wave-tails", "attractivity"]);
    // c = 1.5 is not below c*(-inf) = 1, so attractivity has no theorem behind it
    assert_eq!(records[3]["status"], "hypotheses-unmet");
    assert_eq!(records[2]["pass"], true);
    let fronts = fs::read_to_string(tmp.path().join("out/fronts.csv")).unwrap();
    assert_eq!(fronts.lines().next(), Some("front,t,x"));
    assert!(fronts.lines().any(|l| l.starts_with("rightmost,")));
    assert!(fronts.lines().any(|l| l.starts_with("leftmost,")));
}

#[test]
fn strict_verify_turns_failures_into_exit_four() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), LOGISTIC, &["verify", "--clauses", "attractivity", "--strict"]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(tmp.path(), LOGISTIC, &["verify", "--clauses", "wave", "--strict"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_keeps_input_order_and_honours_the_env_default() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("run.cfg");
    fs::write(&path, LOGISTIC).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_propagate"))
        .args(["sweep", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .env("PROPAGATE_JOBS", "3")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("out/sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("c,c_star_plus,c_star_minus,front_speed_right"));
    let cs: Vec<f64> = lines[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(cs, [0.0, 0.5, 1.0, 1.5]);
    let meta = json(&tmp.path().join("out/sweep.json"));
    assert_hashed(&meta);
    assert_eq!(meta["jobs"], 3);
    assert_eq!(meta["runs"].as_array().unwrap().len(), 4);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        assert!(run(dir, LOGISTIC, &["verify"]).status.success());
        assert!(run(dir, LOGISTIC, &["simulate"]).status.success());
        assert!(run(dir, LOGISTIC, &["speed", "--side", "minus"]).status.success());
    }
    for name in ["trajectory.csv", "fronts.csv", "speed_minus.csv", "verdicts.json", "meta.json"] {
        let x = fs::read(a.path().join("out").join(name)).unwrap();
        let y = fs::read(b.path().join("out").join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
}

#[test]
fn config_errors_exit_two_with_a_json_record() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), "[model]\nkind = fisher\nbogus = 1\n", &["speed"]);
    assert_eq!(out.status.code(), Some(2));
    let rec: Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(rec["error"], "config");
    assert!(rec["message"].as_str().unwrap().contains("model.bogus"));
}

#[test]
fn unconverged_wave_exits_three_after_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!("{LOGISTIC}wave_t_max = 1\n");
    let out = run(tmp.path(), &cfg, &["wave"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(tmp.path().join("out/wave.csv").exists());
    let report = json(&tmp.path().join("out/wave_report.json"));
    assert_eq!(report["wave"]["converged"], false);
}

#[test]
fn wave_reports_the_limiting_states() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), LOGISTIC, &["wave"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("out/wave.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("z,W1"));
    let report = json(&tmp.path().join("out/wave_report.json"));
    assert_hashed(&report);
    assert!(report["wave"]["tail_error"].as_f64().unwrap() < 1e-3);
}
