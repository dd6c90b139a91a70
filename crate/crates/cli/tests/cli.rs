use std::fs;
use std::path::Path;
use std::process::Command as Process;

use serde_json::{json, Value};
use spdc_cli::{run, Command, RunConfig};
use tempfile::TempDir;

fn config(value: Value) -> RunConfig {
    RunConfig::from_json(&value.to_string()).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_column(path: &Path, column: &str) -> Vec<String> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let idx = reader.headers().unwrap().iter().position(|h| h == column).unwrap();
    reader.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

fn spdc(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_spdc")).args(args).output().unwrap()
}

fn write_config(dir: &Path, value: Value) -> String {
    let path = dir.join("config.json");
    fs::write(&path, value.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn phase_match_default_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), json!({"schema_version": 1}));
    let out = dir.path().join("out");
    let status = spdc(&["phase-match", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let summary = read_json(&out.join("summary.json"));
    let theta = summary["theta"].as_f64().unwrap();
    assert!((theta - 2.63214).abs() < 1e-3);
    assert!(summary["residual"].as_f64().unwrap().abs() < 1e-10);

    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "phase-match");
    let outputs: Vec<&str> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(outputs, ["indices.csv", "summary.json"]);
    for name in outputs {
        assert!(out.join(name).exists());
    }
}

#[test]
fn phase_match_at_400_nm() {
    let dir = TempDir::new().unwrap();
    let report = run(
        Command::PhaseMatch,
        &config(json!({"schema_version": 1, "crystal": {"pump_wavelength": 400e-9}})),
        dir.path(),
    )
    .unwrap();
    assert!(report.summary["residual"].as_f64().unwrap().abs() < 1e-10);
    let theta = report.summary["theta"].as_f64().unwrap();
    assert!(theta > std::f64::consts::FRAC_PI_2 && theta < std::f64::consts::PI);
}

#[test]
fn unmatchable_pump_exits_with_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        json!({"schema_version": 1, "crystal": {"pump_wavelength": 10e-6}}),
    );
    let out = spdc(&[
        "phase-match",
        "--config",
        &cfg,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not phase-matchable"));
}

#[test]
fn config_errors() {
    let unknown = RunConfig::from_json(r#"{"schema_version": 1, "crystal": {"lenght": 1e-3}}"#);
    assert!(format!("{:#}", unknown.unwrap_err()).contains("lenght"));
    assert!(RunConfig::from_json(r#"{"schema_version": 2}"#).is_err());
    assert!(RunConfig::from_json(r#"{"schema_version": 1, "crystal": {"length": -1.0}}"#).is_err());
    assert!(RunConfig::from_json(r#"{"schema_version": 1, "grid": {"n_points": 1}}"#).is_err());
    assert!(RunConfig::from_json(r#"{"schema_version": 1, "shaper": {"params": [1.0, 2.0]}}"#).is_err());
    assert!(RunConfig::from_json(
        r#"{"schema_version": 1, "cluster": {"graph": {"linear": 4}, "permutation": [0, 0, 1, 2]}}"#
    )
    .is_err());
    assert!(RunConfig::from_json(r#"{"schema_version": 1, "cluster": {"graph": {"linear": 3}}}"#).is_err());
}

#[test]
fn missing_blocks_are_listed() {
    let dir = TempDir::new().unwrap();
    let base = config(json!({"schema_version": 1}));
    let err = format!("{:#}", run(Command::SqueezingScan, &base, dir.path()).unwrap_err());
    assert!(err.contains("cluster") && err.contains("squeezing_scan"), "{err}");
    let err = format!("{:#}", run(Command::ChirpScan, &base, dir.path()).unwrap_err());
    assert!(err.contains("chirp_scan"), "{err}");
    let nullifier = config(json!({
        "schema_version": 1,
        "optimize": {"fitness": {"kind": "nullifier_f3"}, "max_generations": 1}
    }));
    let err = format!("{:#}", run(Command::Optimize, &nullifier, dir.path()).unwrap_err());
    assert!(err.contains("cluster"), "{err}");
}

#[test]
fn supermodes_calibration_and_format() {
    let dir = TempDir::new().unwrap();
    let cfg = config(json!({"schema_version": 1, "grid": {"n_points": 150}, "supermodes": {"export_modes": 3}}));
    let report = run(Command::Supermodes, &cfg, dir.path()).unwrap();
    let db = csv_column(&dir.path().join("gains.csv"), "squeezing_db");
    assert_eq!(db.len(), 150);
    assert!((db[0].parse::<f64>().unwrap() - 7.0).abs() < 1e-12);
    let mantissa = db[0].split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17);

    let mut reader = csv::Reader::from_path(dir.path().join("supermodes.csv")).unwrap();
    assert_eq!(reader.headers().unwrap().len(), 2 + 2 * 3);
    assert_eq!(reader.records().count(), 150);
    assert_eq!(report.summary["leading_db"], 7.0);
}

#[test]
fn identity_shaper_changes_nothing() {
    let plain = TempDir::new().unwrap();
    let shaped = TempDir::new().unwrap();
    let base = json!({"schema_version": 1, "grid": {"n_points": 120}});
    let mut with_shaper = base.clone();
    with_shaper["shaper"] = json!({"n_control": 32, "window_halfwidth_sigmas": 3.0, "params": "identity"});
    run(Command::Supermodes, &config(base), plain.path()).unwrap();
    let report = run(Command::Supermodes, &config(with_shaper), shaped.path()).unwrap();
    assert_eq!(report.summary["pump_weight"], 1.0);
    for name in ["gains.csv", "supermodes.csv"] {
        assert_eq!(
            fs::read(plain.path().join(name)).unwrap(),
            fs::read(shaped.path().join(name)).unwrap(),
            "{name} differs"
        );
    }
}

#[test]
fn manifest_reproduces_the_run() {
    let first = TempDir::new().unwrap();
    let cfg = config(json!({
        "schema_version": 1,
        "seed": 9,
        "grid": {"n_points": 60},
        "shaper": {"n_control": 8},
        "optimize": {"fitness": {"kind": "gap_f2_bar"}, "max_generations": 4}
    }));
    run(Command::Optimize, &cfg, first.path()).unwrap();
    let manifest = read_json(&first.path().join("manifest.json"));
    assert_eq!(manifest["seed"], 9);
    let replay: RunConfig = serde_json::from_value(manifest["config"].clone()).unwrap();
    assert_eq!(replay, cfg);

    let second = TempDir::new().unwrap();
    run(Command::Optimize, &replay, second.path()).unwrap();
    for name in manifest["outputs"].as_array().unwrap() {
        let name = name.as_str().unwrap();
        assert_eq!(
            fs::read(first.path().join(name)).unwrap(),
            fs::read(second.path().join(name)).unwrap(),
            "{name} differs"
        );
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        json!({
            "schema_version": 1,
            "seed": 1,
            "grid": {"n_points": 40},
            "shaper": {"n_control": 4},
            "optimize": {"fitness": {"kind": "gap_f2_bar"}, "max_generations": 2}
        }),
    );
    let out = dir.path().join("o");
    let status = spdc(&[
        "optimize",
        "--config",
        &cfg,
        "--seed",
        "77",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["seed"], 77);
    assert_eq!(manifest["config"]["seed"], 77);
}

#[test]
fn squeezing_scan_starts_at_vacuum() {
    let dir = TempDir::new().unwrap();
    let cfg = config(json!({
        "schema_version": 1,
        "grid": {"n_points": 150},
        "cluster": {"graph": {"linear": 4}, "permutation": [0, 3, 1, 2]},
        "squeezing_scan": {"leading_db": [0.0, 4.0, 8.0]}
    }));
    run(Command::SqueezingScan, &cfg, dir.path()).unwrap();
    let v: Vec<f64> = csv_column(&dir.path().join("squeezing_scan.csv"), "mean_variance")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((v[0] - 0.5).abs() < 1e-12);
    assert!(v[1] < 0.5 && v[2] < 0.5);
}

#[test]
fn chirp_scan_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = config(json!({
        "schema_version": 1,
        "grid": {"n_points": 120},
        "chirp_scan": {"phi2": [0.0, 2.7e-27, 5.4e-27], "top": 10}
    }));
    let report = run(Command::ChirpScan, &cfg, dir.path()).unwrap();
    assert!(report.summary["chirped_total_gain_spread"].as_f64().unwrap() < 1e-10);
    assert_eq!(report.summary["unchirped_total_gain_increasing"], true);
    let families = csv_column(&dir.path().join("chirp_scan.csv"), "family");
    assert_eq!(
        families,
        ["chirped", "chirped", "chirped", "unchirped", "unchirped", "unchirped"]
    );
    assert_eq!(csv_column(&dir.path().join("chirp_gains.csv"), "gain").len(), 60);
}

#[test]
fn cluster_ranks_every_permutation() {
    let dir = TempDir::new().unwrap();
    let cfg = config(json!({"schema_version": 1, "grid": {"n_points": 200}, "cluster": {"graph": {"linear": 4}}}));
    let report = run(Command::Cluster, &cfg, dir.path()).unwrap();
    let perms = csv_column(&dir.path().join("permutations.csv"), "permutation");
    assert_eq!(perms.len(), 24);
    assert_eq!(perms[0], "0 1 2 3");
    let trivial = report.summary["trivial_mean_variance"].as_f64().unwrap();
    assert!((trivial - 0.49).abs() < 0.05, "{trivial}");
    let best = report.summary["best_mean_variance"].as_f64().unwrap();
    assert!(best <= trivial);
}
