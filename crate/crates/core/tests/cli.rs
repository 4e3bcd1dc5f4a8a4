use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use giantbic::io::{observable_value, run, sweep_table, Cell, IntRange, Observable, RunConfig};

fn giantbic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_giantbic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    let out = dir.to_str().unwrap();
    full.extend(["--out", out]);
    giantbic(&full)
}

/// Rows below the `#` header block.
fn payload(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[test]
fn design_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["design", "--M", "3", "--n0", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("design.json")).unwrap()).unwrap();
    let d = &doc["data"]["design"];
    assert!((d["rho0"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((d["omega_bic"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((d["period"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);
    assert!(d["nm_ratio"].as_f64().is_some());
    assert!((d["phi_bic_sq"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    assert!(doc["data"]["boc"]["energies"][1].as_f64().unwrap() > 2.0);
    assert_eq!(doc["header"]["version"], Value::from(env!("CARGO_PKG_VERSION")));
    assert_eq!(doc["header"]["config"]["command"], Value::from("design"));
}

#[test]
fn exit_codes() {
    assert_eq!(giantbic(&["design", "--M", "2", "--n0", "4"]).status.code(), Some(2));
    assert_eq!(giantbic(&["design", "--n0", "5"]).status.code(), Some(2));
    assert_eq!(giantbic(&["design", "--M", "abc"]).status.code(), Some(2));
    assert_eq!(giantbic(&["sweep", "--n0", "4:8:4"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    // t_max shorter than one oscillation window is fine for evolve itself.
    assert!(run_in(dir.path(), &["evolve", "--tmax", "1", "--samples", "11"]).status.success());
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let out = giantbic(&["design", "--out", blocker.join("x").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn spectrum_schema() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["spectrum", "--M", "3", "--n0", "4", "--N", "60"]).status.success());
    let rows = payload(&dir.path().join("spectrum.csv"));
    assert_eq!(rows[0], "index,energy,emitter_prob,kind");
    assert_eq!(rows.len(), 1 + 61);
    let kinds: Vec<&str> = rows[1..].iter().map(|r| r.rsplit(',').next().unwrap()).collect();
    assert_eq!(kinds.iter().filter(|k| **k == "bic").count(), 2);
    assert_eq!(kinds.iter().filter(|k| **k == "boc").count(), 2);
}

#[test]
fn timeseries_schema_and_reproducibility() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["evolve", "--M", "3", "--n0", "4", "--tmax", "5", "--samples", "51", "--record-sites", "40,42"];
    assert!(run_in(a.path(), &args).status.success());
    assert!(run_in(b.path(), &args).status.success());
    let (ra, rb) = (payload(&a.path().join("timeseries.csv")), payload(&b.path().join("timeseries.csv")));
    assert_eq!(ra[0], "t,prob_atom,leakage,prob_site_40,prob_site_42");
    assert_eq!(ra.len(), 52);
    assert_eq!(ra, rb);
    // Headers carry the resolved configuration, which differs only in --out.
    let header = fs::read_to_string(a.path().join("timeseries.csv")).unwrap();
    assert!(header.lines().nth(1).unwrap().contains("\"t_max\":5.0"));
}

#[test]
fn p_state_table() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["bicstate", "--M", "3", "--n0", "4", "--N", "30"]).status.success());
    let rows = payload(&dir.path().join("pstate.csv"));
    assert_eq!(rows[0], "site,re,im,amplitude,phase");
    assert_eq!(rows.len(), 4);
    let amps: Vec<f64> = rows[1..].iter().map(|r| r.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert!(amps.iter().all(|a| (a - 1.0 / 3f64.sqrt()).abs() < 1e-10));
}

#[test]
fn json_format_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["spectrum", "--N", "20", "--format", "json"]).status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("spectrum.json")).unwrap()).unwrap();
    let rows = doc["data"].as_array().unwrap();
    assert_eq!(rows.len(), 21);
    for key in ["index", "energy", "emitter_prob", "kind"] {
        assert!(rows[0].get(key).is_some(), "{key}");
    }
}

#[test]
fn experiment_plan() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["experiment", "--zmax", "100", "--kappa0", "2", "--d0", "0.01"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    let plan = &doc["data"]["plan"];
    assert!((plan["j_physical"].as_f64().unwrap() - 5.0 * std::f64::consts::PI / 100.0).abs() < 1e-12);
    assert_eq!(plan["imperfection_ratio"].as_f64(), Some(0.0286));
    assert!(plan["separations"]["hopping"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"command": "sweep", "points": 3, "spacing": "8:24:8", "observable": "rho0"}"#).unwrap();
    let out = run_in(dir.path(), &["--config", cfg.to_str().unwrap(), "--observable", "omega_bic"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = payload(&dir.path().join("sweep.csv"));
    assert_eq!(rows[0], "M,n0,observable,value");
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("3,8,omega_bic,"));
}

#[test]
fn sweep_rows_match_standalone_points_and_thread_counts() {
    let base = RunConfig {
        command: giantbic::io::Command::Sweep,
        points: "3:5:2".parse().unwrap(),
        spacing: "8:40:8".parse().unwrap(),
        observable: Some(Observable::BocProb),
        ..RunConfig::default()
    };
    let table = sweep_table(&base).unwrap();
    for row in &table.rows {
        let (Cell::Int(m), Cell::Int(n0), Cell::Float(v)) = (&row[0], &row[1], &row[3]) else {
            panic!("bad row {row:?}");
        };
        let single = RunConfig {
            points: IntRange::single(*m as usize),
            spacing: IntRange::single(*n0 as usize),
            ..base.clone()
        };
        let alone = observable_value(&single, Observable::BocProb, *m as usize, *n0 as usize).unwrap();
        assert_eq!(alone.to_bits(), v.to_bits());
    }
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for (threads, dir) in [1, 3].into_iter().zip(&dirs) {
        let cfg = RunConfig {
            threads: Some(threads),
            out_dir: dir.path().to_path_buf(),
            ..base.clone()
        };
        run(&cfg).unwrap();
    }
    assert_eq!(payload(&dirs[0].path().join("sweep.csv")), payload(&dirs[1].path().join("sweep.csv")));
}

#[test]
fn boc_sweep_decreases_with_spacing() {
    let cfg = RunConfig {
        command: giantbic::io::Command::Sweep,
        spacing: "8:80:8".parse().unwrap(),
        observable: Some(Observable::BocProb),
        ..RunConfig::default()
    };
    let values: Vec<f64> = sweep_table(&cfg)
        .unwrap()
        .rows
        .iter()
        .map(|r| match r[3] {
            Cell::Float(v) => v,
            _ => unreachable!(),
        })
        .collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
}
