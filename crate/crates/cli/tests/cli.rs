use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use slit_fringe_cli::Table;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slit-fringe"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn fig7_nlad_minima_regular() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(bin().args(["simulate", "--config"]).arg(scenario("fig7.json")).arg("--out").arg(dir.path()));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("profile_t1over_pi.csv");
    let out = run(bin()
        .args(["extrema", "--in"])
        .arg(&csv)
        .args(["--column", "omega_nlad", "--window", "0.2:8.8"]));
    assert!(out.status.success());
    let report = stdout_json(&out);
    let minima = report["minima"].as_array().unwrap();
    assert_eq!(minima.len(), 9);
    for (k, m) in minima.iter().enumerate() {
        let x = m["x"].as_f64().unwrap();
        assert!((x - (k as f64 + 0.5)).abs() <= 0.05, "minimum {k} at {x}");
    }
    assert!(!dir.path().join("FAILED").exists());
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn fig8_dilated_column_is_half_omega_at_half_x() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(bin().args(["simulate", "--config"]).arg(scenario("fig8.json")).arg("--out").arg(dir.path()));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = Table::read(&dir.path().join("profile_t2over_pi.csv")).unwrap();
    let omega = table.column("omega_nlad").unwrap();
    let dilated = table.column("omega_nlad_dilated").unwrap();
    // grid is [-80, 80] with 8001 nodes, so x/2 of every even node offset
    // from the centre is itself a node
    let mid = table.grid.len() / 2;
    for k in (0..2000).step_by(37) {
        let i = mid + 2 * k;
        let j = mid + k;
        assert!((dilated[i] - 0.5 * omega[j]).abs() <= 1e-12, "node {i}");
    }
}

#[test]
fn single_method_omits_other_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("se.json");
    std::fs::write(&cfg, r#"{"times": [0.5], "methods": ["se"], "grid": {"x_min": -5, "x_max": 5, "dx": 0.01}}"#).unwrap();
    let out = run(bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("o")));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("o/profile_t0.5over_pi.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,rho_se,log10_rho_se");
    assert_eq!(text.lines().count(), 1002);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"slits": {"b": -0.1}}"#).unwrap();
    let out = run(bin().args(["simulate", "--config"]).arg(&bad));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("slits.b"));

    std::fs::write(&bad, "{\n \"times\": [1,\n}").unwrap();
    let out = run(bin().args(["simulate", "--config"]).arg(&bad));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = run(bin().args(["simulate", "--config"]).arg(dir.path().join("missing.json")));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numeric_failure_exits_with_two_and_marks_output() {
    // a tail_eps this loose drops visible weight from the shift series, so
    // the mass check trips
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("loose.json");
    std::fs::write(
        &cfg,
        r#"{"times": [3.0], "methods": ["nlad_factorized"], "tolerances": {"abs_tol": 1e-8, "tail_eps": 5e-4}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("o");
    let out = run(bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out_dir));
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("FAILED").exists());
    assert!(out_dir.join("profile_t3over_pi.csv").exists());
    assert!(out_dir.join("summary.json").exists());
}

#[test]
fn check_bounds_reports_each_pair() {
    let out = run(bin()
        .args(["check-bounds", "--config"])
        .arg(scenario("fig7.json"))
        .args(["--pairs", "1:1,2:1,10:1"]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = stdout_json(&out);
    let pairs = r["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    assert_eq!(pairs[0]["lhs_sup"].as_f64().unwrap(), 0.0);
    let rhs2 = pairs[1]["rhs_bound"].as_f64().unwrap();
    assert!((rhs2 - 0.89154).abs() < 1e-5, "{rhs2}");
    let (l2, l10) = (pairs[1]["lhs_sup"].as_f64().unwrap(), pairs[2]["lhs_sup"].as_f64().unwrap());
    assert!(l10 < l2);
    assert!(r["passed"].as_bool().unwrap());
}

#[test]
fn compare_identical_files_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(bin().args(["simulate", "--config"]).arg(scenario("fig7.json")).arg("--out").arg(dir.path()));
    assert!(out.status.success());
    let csv = dir.path().join("profile_t1over_pi.csv");
    let out = run(bin().args(["compare", "--a"]).arg(&csv).arg("--b").arg(&csv));
    assert!(out.status.success());
    let r = stdout_json(&out);
    for col in ["rho_se", "omega_nlad", "log10_rho_se", "log10_omega_nlad"] {
        assert_eq!(r[col]["sup"].as_f64().unwrap(), 0.0, "{col}");
    }
    let out = run(bin()
        .args(["compare", "--a"])
        .arg(&csv)
        .arg("--b")
        .arg(&csv)
        .args(["--column", "nope"]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"times": [0.5, 2.0], "methods": ["se", "nlad_factorized"]}"#).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let out = run(bin().env("SLIT_FRINGE_THREADS", "1").args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&a));
    assert!(out.status.success());
    let out = run(bin().env("SLIT_FRINGE_THREADS", "3").args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&b));
    assert!(out.status.success());
    for f in ["profile_t0.5over_pi.csv", "profile_t2over_pi.csv", "summary.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let out = run(bin().env("SLIT_FRINGE_THREADS", "zero").args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&a));
    assert_eq!(out.status.code(), Some(1));
}
