use std::path::Path;
use std::process::{Command, Output};

use fslab::norms::{NormKind, NormReport};
use fslab::solver::{SolveConfig, SolveReport};

fn fslab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fslab"))
        .args(args)
        .current_dir(dir)
        .env("FSLB_THREADS", "1")
        .output()
        .expect("binary runs")
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fslab(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fslab(&["solve", "--config", "missing.cfg"], dir.path()).status.code(), Some(2));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[grid]\ndim = 2\n").unwrap();
    assert_eq!(fslab(&["solve", "--config", "bad.toml"], dir.path()).status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fslab"))
        .args(["report", "--in", "."])
        .current_dir(dir.path())
        .env("FSLB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_then_norms_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = SolveConfig::small_data(2, 16, 0.75);
    config.output.prefix = Some("run".into());
    std::fs::write(dir.path().join("run.toml"), config.to_toml()).unwrap();

    let solve = fslab(&["solve", "--config", "run.toml", "--out", "out"], dir.path());
    assert_eq!(solve.status.code(), Some(0), "{}", String::from_utf8_lossy(&solve.stderr));
    let report = SolveReport::from_json(&std::fs::read_to_string(dir.path().join("out/run_report.json")).unwrap()).unwrap();
    assert!(report.converged());

    let norms = fslab(&["norms", "--in", "out/run.fslb", "--kind", "f", "--out", "out/f.json"], dir.path());
    assert_eq!(norms.status.code(), Some(0), "{}", String::from_utf8_lossy(&norms.stderr));
    let f = NormReport::from_json(&std::fs::read_to_string(dir.path().join("out/f.json")).unwrap()).unwrap();
    assert_eq!(f.kind, NormKind::FSigma);
    assert!(f.value.is_finite() && f.value > 0.0);

    let xk = fslab(&["norms", "--in", "out/run.fslb", "--kind", "xk", "--k", "0"], dir.path());
    assert_eq!(xk.status.code(), Some(0));
    let x = NormReport::from_json(&String::from_utf8(xk.stdout).unwrap()).unwrap();
    assert_eq!(x.kind, NormKind::Xk);
    assert_eq!(fslab(&["norms", "--in", "out/run.fslb", "--kind", "zk"], dir.path()).status.code(), Some(2));

    let summary = fslab(&["report", "--in", "out"], dir.path());
    assert_eq!(summary.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(doc["documents"], 2);
    assert_eq!(doc["all_ok"], true);
}

#[test]
fn divergent_solve_exits_with_a_check_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = SolveConfig::small_data(2, 16, 0.75);
    config.data.epsilon = 200.0;
    config.picard.track_f_sigma = false;
    std::fs::write(dir.path().join("big.toml"), config.to_toml()).unwrap();
    let out = fslab(&["solve", "--config", "big.toml", "--out", "out"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let report = SolveReport::from_json(&std::fs::read_to_string(dir.path().join("out/solution_report.json")).unwrap()).unwrap();
    assert!(!report.converged());
}

#[test]
fn verify_nprops_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = fslab(&["verify", "nprops", "--s", "0.75", "--k", "6", "--samples", "10000"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("fslab-out/verify_nprops.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["suite"], "nprops");
    assert_eq!(doc["passed"], true);
    assert!(String::from_utf8(out.stdout).unwrap().lines().all(|l| !l.starts_with("FAIL")));
}

#[test]
fn dispersive_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("spec.toml"),
        "n = 3\ns = 0.75\nx = [0.0, 0.0, 0.0]\nt = 0.0\n[cutoff]\nkind = \"annulus\"\nk = 0\n",
    )
    .unwrap();
    let out = fslab(&["dispersive", "--spec", "spec.toml", "--count", "9"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("fslab-out/dispersive.csv")).unwrap();
    assert!(csv.starts_with("t,value,bound,ratio"));
    assert_eq!(csv.lines().count(), 10);
}
