// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hybridcool")).args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

const BASE: &str = "\
Omega = 10.0
Delta_q = -5.27
Omega_R = 8.5
Gamma = 2.0
gamma = 0.02
kappa = 1.0
Delta_c = -10.0
n_th = 0.5
Gamma_d = 0.02
G = 0.2
G_o = 0.1
";

fn config(extra: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{BASE}{extra}").unwrap();
    f
}

#[test]
fn optimal_drive_json() {
    let o = run(&["optimal-drive"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let f = v["f_max"].as_f64().unwrap();
    assert!(f > 0.0 && f < 1.0);
    assert!(v["Delta_q"].as_f64().unwrap() < 0.0);
    assert!(v["n_min"].as_f64().unwrap() > 0.0);
}

#[test]
fn fig3_resolved_hybrid_is_lowest() {
    let o = run(&["fig3", "--regime", "resolved"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("G0_MHz,n_qubit_only,n_cavity_only,n_hybrid\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 101);
    for r in &rows {
        assert!(r[3] <= r[1] * (1.0 + 1e-12) && r[3] <= r[2] * (1.0 + 1e-12), "{r:?}");
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let a = run(&["--threads", "1", "fig3", "--regime", "unresolved"]);
    let b = run(&["--threads", "4", "fig3", "--regime", "unresolved"]);
    let c = run(&["fig3", "--regime", "unresolved"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let s1 = run(&["--threads", "1", "spectrum", "force"]);
    let s4 = run(&["--threads", "4", "spectrum", "force"]);
    assert_eq!(s1.stdout, s4.stdout);
}

#[test]
fn spectrum_grid_has_default_size() {
    let o = run(&["spectrum", "qubit"]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&stdout(&o)).len(), 601);
}

#[test]
fn fig4_hybrid_beats_single_channels() {
    let o = run(&["fig4", "--case", "b"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1000.0);
    assert!(last[1] < last[2] && last[1] < last[3], "{last:?}");
}

#[test]
fn small_cutoff_oracle_reports_cutoff_error() {
    let o = run(&["oracle"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(o.stdout.is_empty());
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["code"], 5);
    assert_eq!(err["context"]["subsystem"], "mechanics");
}

#[test]
fn unknown_config_key_names_its_line() {
    let f = config("bogus = 3\n");
    let o = run(&["--config", f.path().to_str().unwrap(), "derive"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["context"]["line"], 12);
    assert_eq!(err["context"]["field"], "bogus");
}

#[test]
fn missing_required_key_is_config_error() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "Omega = 10.0\n").unwrap();
    let o = run(&["--config", f.path().to_str().unwrap(), "derive"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("drive.json");
    let o = run(&["--out", path.to_str().unwrap(), "optimal-drive"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let direct = run(&["optimal-drive"]);
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn sweep_over_configured_axis() {
    let f = config("sweep_field = \"n_th\"\nsweep_start = 0.0\nsweep_stop = 2.0\nsweep_points = 5\n");
    let o = run(&["--config", f.path().to_str().unwrap(), "sweep"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("n_th,G,G_o,"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    // a hotter bath leaves more phonons
    for w in rows.windows(2) {
        assert!(w[1][7] > w[0][7], "{w:?}");
    }
    let json = run(&["--config", f.path().to_str().unwrap(), "--format", "json", "sweep"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn sweep_without_axis_is_config_error() {
    let f = config("");
    let o = run(&["--config", f.path().to_str().unwrap(), "sweep"]);
    assert_eq!(o.status.code(), Some(2));
}
