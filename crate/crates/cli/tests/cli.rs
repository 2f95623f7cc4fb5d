use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rgsim::gravimetry::heuristic_phase;
use serde_json::Value;
use tempfile::TempDir;

fn rgsim(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rgsim"));
    cmd.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("RGSIM_")) {
        cmd.env_remove(k);
    }
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sensitivity_writes_curve_and_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s");
    ok(&rgsim(&["--scenario", "sensitivity", "--out", out.to_str().unwrap()], &[]));
    let csv = fs::read_to_string(out.join("sensitivity.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,dg,dg_rel,F,F_q"));
    assert_eq!(lines.count(), 201);
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["scenario"], "sensitivity");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(m["config"]["params"].is_object());
    let at1 = m["summary"]["dg_rel_at_1s"].as_f64().unwrap();
    assert!(at1 > 3.5e-9 && at1 < 1.4e-8, "{at1}");
}

#[test]
fn estimate_is_bitwise_reproducible_per_seed() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        ok(&rgsim(
            &["--scenario", "estimate", "--seed", seed, "--out", out.to_str().unwrap()],
            &[("RGSIM_ESTIMATE_RECORDS", "20"), ("RGSIM_ESTIMATE_SAMPLES", "40")],
        ));
        fs::read(out.join("estimates.csv")).unwrap()
    };
    let a = run("a", "7");
    let b = run("b", "7");
    let c = run("c", "8");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn config_file_then_env_then_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"scenario": "sensitivity", "seed": 3, "curve": {"points": 5, "t_max": 2.0}}"#).unwrap();
    let out = dir.path().join("o");
    ok(&rgsim(
        &["--config", cfg.to_str().unwrap(), "--seed", "11", "--out", out.to_str().unwrap()],
        &[("RGSIM_CURVE_POINTS", "7"), ("RGSIM_SEED", "5")],
    ));
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["seed"], 11);
    assert_eq!(m["config"]["curve"]["points"], 7);
    assert_eq!(m["config"]["curve"]["t_max"], 2.0);
    assert_eq!(fs::read_to_string(out.join("sensitivity.csv")).unwrap().lines().count(), 8);
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let o = out.to_str().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"params": {"gravity": 1}}"#).unwrap();
    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{").unwrap();
    let cases: Vec<Output> = vec![
        rgsim(&["--out", o], &[]),
        rgsim(&["--scenario", "sensitivity", "--config", bad.to_str().unwrap(), "--out", o], &[]),
        rgsim(&["--scenario", "sensitivity", "--config", broken.to_str().unwrap(), "--out", o], &[]),
        rgsim(&["--scenario", "sensitivity", "--out", o], &[("RGSIM_CURVE_NOPE", "1")]),
        rgsim(&["--scenario", "sensitivity", "--out", o], &[("RGSIM_CURVE_POINTS", "1")]),
        rgsim(&["--scenario", "fall", "--out", o], &[("RGSIM_PARAMS_N_GRID", "0")]),
    ];
    for (i, c) in cases.iter().enumerate() {
        assert_eq!(c.status.code(), Some(2), "case {i}: {}", String::from_utf8_lossy(&c.stderr));
        assert!(String::from_utf8_lossy(&c.stderr).contains("error"), "case {i}");
    }
}

#[test]
fn missing_input_file_exits_with_1() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let c = rgsim(
        &["--scenario", "fit", "--out", out.to_str().unwrap()],
        &[("RGSIM_FIT_TRACE", dir.path().join("absent.csv").to_str().unwrap())],
    );
    assert_eq!(c.status.code(), Some(1));
}

#[test]
fn fit_recovers_a_synthetic_trace() {
    let dir = TempDir::new().unwrap();
    let (xi, zeta, phi0) = (0.8, 0.05, 0.3);
    let g_kc = 10.0 / std::f64::consts::PI;
    let mut csv = String::from("t,phi\n");
    for i in 0..=2000 {
        let t = i as f64 * 0.01;
        csv += &format!("{t},{}\n", heuristic_phase(t, g_kc, 1.0, xi, zeta, phi0));
    }
    let trace = dir.path().join("trace.csv");
    fs::write(&trace, csv).unwrap();
    let out = dir.path().join("o");
    ok(&rgsim(&["--scenario", "fit", "--out", out.to_str().unwrap()], &[("RGSIM_FIT_TRACE", trace.to_str().unwrap())]));
    let fit = json(&out.join("fit.json"));
    assert!((fit["xi"].as_f64().unwrap() - xi).abs() < 1e-6 * xi, "{fit}");
    assert!((fit["zeta"].as_f64().unwrap() - zeta).abs() < 1e-6 * zeta, "{fit}");
    assert!((fit["phi0"].as_f64().unwrap() - phi0).abs() < 1e-6, "{fit}");
}

#[test]
fn scan_writes_power_law() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    ok(&rgsim(&["--scenario", "scan-N", "--out", out.to_str().unwrap()], &[("RGSIM_SCAN_POINTS", "4")]));
    assert_eq!(fs::read_to_string(out.join("scan.csv")).unwrap().lines().count(), 5);
    let fit = json(&out.join("power_law.json"));
    assert!(fit["b"].as_f64().unwrap() > 1.5 && fit["a"].as_f64().unwrap() > 0.0, "{fit}");
}

#[test]
fn quantum_ground_writes_q_functions() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    ok(&rgsim(
        &["--scenario", "quantum-ground", "--out", out.to_str().unwrap()],
        &[("RGSIM_QUANTUM_N_SITES", "8"), ("RGSIM_QGRID_POINTS", "21")],
    ));
    for f in ["q_plus.csv", "q_minus.csv", "density.csv", "ground.bin", "ground.json", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let m = json(&out.join("manifest.json"));
    assert!(m["summary"]["energy"].as_f64().unwrap() < 0.0);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 5);
}
