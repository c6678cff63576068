use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qfridge::{RunManifest, Sidecar, SWEEP_HEADER};
use serde_json::{json, Value};

fn config(t_h_values: Option<&[f64]>) -> Value {
    let mut v = json!({
        "gaps": [1.0, 5.0, 4.0],
        "gammas": [1.0, 1.0, 1.0],
        "reservoirs": [
            {"role": "cold", "statistics": "bosonic", "temperature": 1.0},
            {"role": "room", "statistics": "bosonic", "temperature": 2.0},
            {"role": "hot", "statistics": "bosonic", "temperature": 10.0}
        ],
        "coupling": 1.0
    });
    if let Some(th) = t_h_values {
        v["th_values"] = json!(th);
    }
    v
}

fn write_config(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfridge")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_reports_a_cooled_qubit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &config(None));
    let out = dir.path().join("solve.csv");
    run_ok(&["solve", "--config", s(&cfg), "--out", s(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[5], "ok");
    assert!(fields[1].parse::<f64>().unwrap() < 1.0);
    assert!(fields[2].parse::<f64>().unwrap() < 0.0);
}

#[test]
fn empty_sweep_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &config(Some(&[])));
    let out = run(&["sweep-th", "--config", s(&cfg), "--out", s(&dir.path().join("x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "config");
}

#[test]
fn invalid_reservoir_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut value = config(None);
    value["reservoirs"][2]["temperature"] = json!(-1.0);
    let cfg = write_config(dir.path(), "cfg.json", &value);
    let out = run(&["solve", "--config", s(&cfg), "--out", s(&dir.path().join("x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweeps_are_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let grid: Vec<f64> = (10..=100).map(|i| i as f64 / 10.0).collect();
    let cfg = write_config(dir.path(), "cfg.json", &config(Some(&grid)));
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run_ok(&["sweep-th", "--config", s(&cfg), "--out", s(&a), "--parallel", "1"]);
    run_ok(&["sweep-th", "--config", s(&cfg), "--out", s(&b), "--parallel", "4"]);
    let (a, b) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), grid.len() + 1);
    assert!(!text.to_lowercase().contains("nan"));
}

#[test]
fn sidecar_reruns_to_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &config(Some(&[1.0, 2.5, 10.0])));
    let first = dir.path().join("first.csv");
    run_ok(&["sweep-th", "--config", s(&cfg), "--out", s(&first)]);
    let sidecar_path = dir.path().join("first.json");
    let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(&sidecar_path).unwrap()).unwrap();
    assert_eq!(sidecar.tool_version, env!("CARGO_PKG_VERSION"));
    assert_eq!(sidecar.manifest.output, first);

    let second = dir.path().join("second.csv");
    run_ok(&["sweep-th", "--config", s(&sidecar_path), "--out", s(&second)]);
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn manifest_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &config(Some(&[3.0])));
    let out = dir.path().join("m.csv");
    run_ok(&["sweep-th", "--config", s(&cfg), "--out", s(&out), "--threshold-mode", "grid-edge"]);
    let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    let text = serde_json::to_string(&sidecar.manifest).unwrap();
    let back: RunManifest = serde_json::from_str(&text).unwrap();
    assert_eq!(back, sidecar.manifest);
}

#[test]
fn mostly_failed_sweep_exits_with_solver_error() {
    let dir = tempfile::tempdir().unwrap();
    // bosonic baths reject T_h <= 0, so three of four points fail
    let cfg = write_config(dir.path(), "cfg.json", &config(Some(&[-1.0, -2.0, -3.0, 5.0])));
    let out = dir.path().join("bad.csv");
    let status = run(&["sweep-th", "--config", s(&cfg), "--out", s(&out)]).status;
    assert_eq!(status.code(), Some(3));
    let text = fs::read_to_string(&out).unwrap();
    let statuses: Vec<&str> = text.lines().skip(1).map(|l| if l.ends_with(",ok") { "ok" } else { "error" }).collect();
    assert_eq!(statuses, ["error", "error", "error", "ok"]);
}

#[test]
fn negative_plateau_reports_the_saturated_value() {
    let dir = tempfile::tempdir().unwrap();
    let mut value = config(None);
    value["reservoirs"][2] = json!({"role": "hot", "statistics": "fermionic", "temperature": -1.0});
    let cfg = write_config(dir.path(), "cfg.json", &value);
    let out = dir.path().join("p.csv");
    run_ok(&["plateau", "--config", s(&cfg), "--out", s(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    let t1: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((t1 - 0.7805).abs() < 1e-3, "{t1}");
}

#[test]
fn reproduce_fig4_writes_the_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig");
    run_ok(&["reproduce", "fig4", "--out", s(&out)]);
    let table = fs::read_to_string(out.join("fig4.csv")).unwrap();
    let rows: Vec<Vec<f64>> =
        table.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        // negative-temperature cooling beats positive at every T_c
        assert!(r[4] > r[3]);
    }
    let thresholds = fs::read_to_string(out.join("fig4_thresholds.csv")).unwrap();
    assert_eq!(thresholds.lines().count(), 5);
    assert!(thresholds.contains("positive,grid-edge,0.476"));
    assert!(out.join("run.json").exists());
}
