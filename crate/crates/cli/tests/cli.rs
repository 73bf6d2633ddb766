use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sombrero(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sombrero"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("SOMBRERO_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn report(out: &Path) -> Value {
    serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap()
}

fn final_energy(report: &Value) -> f64 {
    report["energies"].as_array().unwrap().last().unwrap().as_f64().unwrap()
}

#[test]
fn solve_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = sombrero(dir.path(), &["solve", "--n", "3", "--g", "1", "--A", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    for key in ["params", "a", "xi", "energies", "converged", "iterations", "argmax_radius", "anchor"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["converged"], Value::Bool(true));
    assert!((final_energy(&r) - (5.0f64 / 3.0).powf(1.5)).abs() < 1e-8);
}

#[test]
fn report_round_trips_through_the_library() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sombrero(dir.path(), &["solve", "--n", "3", "--g", "2", "--A", "2"]).status.success());
    let text = fs::read_to_string(dir.path().join("report.json")).unwrap();
    let parsed: sombrero::SolverReport = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
    assert_eq!(again, text);
}

#[test]
fn trial_parameter_does_not_move_the_energy() {
    let dir = tempfile::tempdir().unwrap();
    let energies: Vec<f64> = ["2", "5"]
        .iter()
        .map(|a| {
            assert!(sombrero(dir.path(), &["solve", "--n", "3", "--g", "1", "--A", "2", "--a-trial", a]).status.success());
            final_energy(&report(dir.path()))
        })
        .collect();
    assert!((energies[0] - energies[1]).abs() < 5e-4);
}

#[test]
fn iteration_cap_reports_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = sombrero(dir.path(), &["solve", "--n", "3", "--g", "1", "--A", "2", "--max-iter", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(dir.path())["converged"], Value::Bool(false));
}

#[test]
fn missing_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = sombrero(dir.path(), &["solve", "--n", "3", "--g", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--A"));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn invalid_model_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = sombrero(dir.path(), &["solve", "--n", "0", "--g", "1", "--A", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
}

#[test]
fn curves_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sombrero(dir.path(), &["solve", "--n", "3", "--g", "1", "--A", "2", "--curves"]).status.success());
    let text = fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,phi,psi,f"));
    assert_eq!(lines.next().unwrap().split(',').take(3).collect::<Vec<_>>(), ["0", "1", "1"]);
}

#[test]
fn table1_passes_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let first = sombrero(dir.path(), &["table1"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stdout));
    let bytes = fs::read(dir.path().join("table1.csv")).unwrap();
    assert!(sombrero(dir.path(), &["table1"]).status.success());
    assert_eq!(fs::read(dir.path().join("table1.csv")).unwrap(), bytes);
    let text = String::from_utf8(bytes).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")));
}

#[test]
fn loose_tolerance_degrades_gracefully() {
    let dir = tempfile::tempdir().unwrap();
    sombrero(dir.path(), &["--format", "json", "table1", "--tol", "1e-2"]);
    let rows: Value = serde_json::from_slice(&fs::read(dir.path().join("table1.json")).unwrap()).unwrap();
    for row in rows.as_array().unwrap() {
        let dev = row["deviation"].as_f64().unwrap();
        assert!(dev.abs() <= 5e-2, "{row}");
    }
}

#[test]
fn figures_have_labelled_columns() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sombrero(dir.path(), &["figures"]).status.success());
    for (name, header) in [("fig1.csv", "r,trial,psi"), ("fig2.csv", "r,A=1,A=2,A=3"), ("fig3.csv", "r,g=0.5,g=1,g=2")] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(header));
        let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 301);
        for col in 1..rows[0].len() {
            let peak = rows.iter().map(|r| r[col]).fold(f64::NEG_INFINITY, f64::max);
            assert!((peak - 1.0).abs() < 1e-12, "{name} column {col}");
        }
    }
    let fig1 = fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    let first: Vec<f64> = fig1.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!(first[1] < 1.0, "trial function peaks away from the origin");
}

#[test]
fn oracle_matches_exact_case() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sombrero(dir.path(), &["--format", "json", "oracle", "--n", "3", "--g", "1", "--A", "2"]).status.success());
    let rows: Value = serde_json::from_slice(&fs::read(dir.path().join("oracle.json")).unwrap()).unwrap();
    let row = &rows[0];
    assert!((row["extrapolated"].as_f64().unwrap() - row["exact"].as_f64().unwrap()).abs() < 1e-6);
}

#[test]
fn oracle_rejects_coarse_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = sombrero(dir.path(), &["oracle", "--n", "3", "--g", "1", "--A", "2", "--step", "0.05"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = sombrero(dir.path(), &["sweep", "--g-count", "0"]);
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(dir.path().join("sweep.csv")).unwrap(),
        "g,A,energy,argmax_radius,shape,anchor,converged,iterations,status\n"
    );
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--g-min", "0.5", "--g-max", "2", "--g-count", "3", "--A-min", "1", "--A-max", "3", "--A-count", "3"];
    assert!(sombrero(dir.path(), &args).status.success());
    let bytes = fs::read(dir.path().join("sweep.csv")).unwrap();
    assert!(sombrero(dir.path(), &args).status.success());
    assert_eq!(fs::read(dir.path().join("sweep.csv")).unwrap(), bytes);

    let text = String::from_utf8(bytes).unwrap();
    let keys: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<&str> = l.split(',').collect();
            (v[0].parse().unwrap(), v[1].parse().unwrap())
        })
        .collect();
    assert_eq!(keys.len(), 9);
    assert_eq!(keys[0], (0.5, 1.0));
    assert_eq!(keys[1], (0.5, 2.0));
    assert_eq!(keys[8], (2.0, 3.0));
    let origin = text.lines().find(|l| l.starts_with("0.5,1,")).unwrap();
    assert!(origin.contains(",origin,"), "{origin}");
    let ring = text.lines().find(|l| l.starts_with("2,3,")).unwrap();
    assert!(ring.contains(",ring,"), "{ring}");
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_sombrero"))
        .args(["oracle", "--n", "1", "--g", "1", "--A", "2"])
        .env("SOMBRERO_OUT_DIR", dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert!(dir.path().join("oracle.csv").exists());
}
