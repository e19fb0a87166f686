//! End-to-end runs of the `qwalk` binary against temporary directories.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn qwalk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> serde_json::Value {
    let out = qwalk(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let line = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(v["status"], "ok");
    v
}

fn error_kind(out: &Output) -> String {
    assert!(!out.status.success());
    let line = String::from_utf8_lossy(&out.stderr);
    let v: serde_json::Value = serde_json::from_str(line.trim()).expect("one JSON error line");
    v["error"]["kind"].as_str().unwrap().to_string()
}

/// `(x, prob, stderr)` rows of a distribution CSV.
fn read_rows(path: &Path) -> Vec<(i64, f64, String)> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["x", "rescaled_x", "prob", "stderr"]);
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[2].parse().unwrap(), r[3].to_string())
        })
        .collect()
}

fn tmp() -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let path = dir.path().to_path_buf();
    (dir, path)
}

#[test]
fn classical_long_run_conserves_mass() {
    let (_g, dir) = tmp();
    ok(&dir, &["simulate", "--method", "classical", "--lambda", "0.7", "--zeta", "0.6", "--t", "2000", "--out", "c.csv"]);
    let rows = read_rows(&dir.join("c.csv"));
    assert_eq!(rows.len(), 2001);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
    assert!(rows.iter().all(|r| r.2.is_empty()));
    let total: f64 = rows.iter().map(|r| r.1).sum();
    assert!((total - 1.0).abs() < 1e-9, "mass {total}");

    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("c.json")).unwrap()).unwrap();
    for key in ["config", "method", "clamp_events", "provenance", "wall_time_seconds"] {
        assert!(meta.get(key).is_some(), "metadata lacks {key}");
    }
    assert!(meta["provenance"]["rng"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn monte_carlo_output_is_reproducible() {
    let (_g, dir) = tmp();
    let args = |out: &'static str| {
        ["simulate", "--method", "trajectory", "--lambda", "0.5", "--zeta", "1", "--p", "0.4", "--t", "40", "--samples", "3000", "--seed", "11", "--out", out]
    };
    ok(&dir, &args("a.csv"));
    ok(&dir, &args("b.csv"));
    let a = std::fs::read(dir.join("a.csv")).unwrap();
    let b = std::fs::read(dir.join("b.csv")).unwrap();
    assert_eq!(a, b);
    assert!(read_rows(&dir.join("a.csv")).iter().all(|r| !r.2.is_empty()));

    ok(&dir, &["simulate", "--method", "trajectory", "--lambda", "0.5", "--zeta", "1", "--p", "0.4", "--t", "40", "--samples", "3000", "--seed", "12", "--out", "c.csv"]);
    assert_ne!(a, std::fs::read(dir.join("c.csv")).unwrap());
}

#[test]
fn exact_and_trajectory_agree() {
    let (_g, dir) = tmp();
    let common = ["--lambda", "0.6", "--zeta", "0.8", "--p", "0.3", "--t", "60", "--seed", "5"];
    let mut exact = vec!["simulate", "--method", "exact", "--out", "e.csv"];
    exact.extend(common);
    let mut traj = vec!["simulate", "--method", "trajectory", "--samples", "100000", "--out", "m.csv"];
    traj.extend(common);
    ok(&dir, &exact);
    ok(&dir, &traj);
    let v = ok(&dir, &["compare", "m.csv", "--against", "e.csv", "--metric", "tv"]);
    let tv = v["summary"]["distance"].as_f64().unwrap();
    assert!(tv <= 0.01, "tv {tv}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let (_g, dir) = tmp();
    std::fs::write(dir.join("run.cfg"), "# walk\nlambda = 0.5\nzeta = 1\nlamda = 0.4\n").unwrap();
    let out = qwalk(&dir, &["simulate", "--config", "run.cfg", "--method", "pure", "--t", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "config");
    assert!(String::from_utf8_lossy(&out.stderr).contains("lamda"));
}

#[test]
fn config_file_and_flags_combine() {
    let (_g, dir) = tmp();
    std::fs::write(dir.join("run.cfg"), "lambda = 0.5\nzeta = 1\nmethod = pure\nt = 10\nout = from_file.csv\n").unwrap();
    ok(&dir, &["simulate", "--config", "run.cfg", "--t", "12"]);
    assert_eq!(read_rows(&dir.join("from_file.csv")).len(), 13);
}

#[test]
fn exact_above_cap_is_refused() {
    let (_g, dir) = tmp();
    let out = qwalk(&dir, &["simulate", "--method", "exact", "--lambda", "0.5", "--zeta", "1", "--p", "0.2", "--t", "301"]);
    assert_eq!(error_kind(&out), "horizon_above_cap");
    assert!(!dir.join("simulation.csv").exists());
    ok(&dir, &["simulate", "--method", "exact", "--lambda", "0.5", "--zeta", "1", "--p", "0.2", "--t", "12", "--cap", "12"]);
}

#[test]
fn bad_invocations_report_json() {
    let (_g, dir) = tmp();
    assert_eq!(error_kind(&qwalk(&dir, &["nonsense"])), "usage");
    assert_eq!(error_kind(&qwalk(&dir, &["simulate", "--method", "pure", "--lambda", "0.5", "--zeta", "1"])), "config");
    assert_eq!(error_kind(&qwalk(&dir, &["simulate", "--method", "pure", "--lambda", "-1", "--zeta", "1", "--t", "5"])), "parameter");
    assert_eq!(error_kind(&qwalk(&dir, &["compare", "missing.csv", "--reference", "arcsine"])), "input");
}

#[test]
fn single_point_sweep_matches_fit() {
    let (_g, dir) = tmp();
    let point = ["--method", "pure", "--lambda", "0.5", "--zeta", "1.5", "--times", "100:600:100"];
    let mut sweep = vec!["sweep", "--out", "s.csv"];
    sweep.extend(point);
    let mut fit = vec!["fit", "--out", "f.csv"];
    fit.extend(point);
    ok(&dir, &sweep);
    ok(&dir, &fit);
    let coefficients = std::fs::read_to_string(dir.join("s.coefficients.csv")).unwrap();
    assert_eq!(coefficients, std::fs::read_to_string(dir.join("f.csv")).unwrap());
    assert!(coefficients.starts_with("lambda,zeta,p,model,c,r,r_squared,rmse,converged\n"));
    assert_eq!(coefficients.lines().count(), 3);

    // Refitting the written series reproduces the coefficients.
    ok(&dir, &["fit", "s.csv", "--out", "g.csv"]);
    assert_eq!(coefficients, std::fs::read_to_string(dir.join("g.csv")).unwrap());
}

#[test]
fn classical_diffuses_towards_gaussian() {
    let (_g, dir) = tmp();
    ok(&dir, &["simulate", "--method", "classical", "--lambda", "1", "--zeta", "0", "--t", "100", "--out", "c.csv"]);
    // mu = 1 swaps the coin every step, so the walker zigzags in place.
    let rows = read_rows(&dir.join("c.csv"));
    let support: Vec<_> = rows.iter().filter(|r| r.1 > 0.0).map(|r| r.0).collect();
    assert!(support.len() <= 2, "{support:?}");

    ok(&dir, &["simulate", "--method", "classical", "--lambda", "0.5", "--zeta", "0", "--t", "400", "--gamma", "0.5", "--out", "g.csv"]);
    let v = ok(&dir, &["compare", "g.csv", "--reference", "gaussian:1", "--gamma", "0.5"]);
    assert!(v["summary"]["distance"].as_f64().unwrap() < 0.05);
}
