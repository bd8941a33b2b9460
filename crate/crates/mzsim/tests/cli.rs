use std::process::{Command, Output};

use mzsim::cli::parse_args;
use mzsim::output::{emit_sweep_csv, SWEEP_HEADER};
use mzsim::parallel::par_sweep;
use mzsim_core::{sweep, ExperimentConfig, Mode, Variant};

fn mzsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzsim")).args(args).output().expect("spawn mzsim")
}

/// Parses CSV strictly: every record must have the header's width.
fn records(bytes: &[u8]) -> Vec<csv::StringRecord> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(bytes);
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), SWEEP_HEADER);
    reader.records().map(|r| r.unwrap()).collect()
}

#[test]
fn exit_codes() {
    assert_eq!(mzsim(&["--help"]).status.code(), Some(0));
    assert_eq!(mzsim(&["--version"]).status.code(), Some(0));
    assert_eq!(mzsim(&["run", "--bogus"]).status.code(), Some(2));
    let bad = mzsim(&["run", "--noise-p", "1.5"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--noise-p"));
    // A zero target offset cannot realize the phase shifter.
    let unrealizable = mzsim(&["run", "--mode", "pulse", "--offset-target", "0"]);
    assert_eq!(unrealizable.status.code(), Some(1));
}

#[test]
fn quantum_delayed_csv_has_every_grid_point() {
    let out = mzsim(&["run", "--variant", "quantum-delayed", "--alphas", "0,0.3927,0.7854,1.1781,1.5708"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = records(&out.stdout);
    assert_eq!(rows.len(), 105);
    for row in &rows {
        let s0: f64 = row[4].parse().unwrap();
        let theory: f64 = row[6].parse().unwrap();
        assert!((s0 - theory).abs() <= 1e-10);
        assert!(!row[7].is_empty() && !row[10].is_empty());
    }
}

#[test]
fn closed_csv_leaves_alpha_and_lines_empty() {
    let out = mzsim(&["run", "--variant", "closed"]);
    let rows = records(&out.stdout);
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r[2].is_empty() && r[7].is_empty() && &r[0] == "closed"));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["run", "--variant", "wheeler", "--seed", "9", "--shots", "3000", "--mode", "pulse"];
    let first = mzsim(&args);
    let second = mzsim(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let other_seed = mzsim(&["run", "--variant", "wheeler", "--seed", "10", "--shots", "3000", "--mode", "pulse"]);
    assert_ne!(first.stdout, other_seed.stdout);
}

#[test]
fn files_and_visibility_table() {
    let dir = tempfile::tempdir().unwrap();
    let sweep_path = dir.path().join("sweep.csv");
    let vis_path = dir.path().join("vis.csv");
    let out = mzsim(&[
        "run",
        "--variant",
        "quantum-delayed",
        "--out",
        sweep_path.to_str().unwrap(),
        "--visibility-out",
        vis_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(records(&std::fs::read(&sweep_path).unwrap()).len(), 105);

    let mut reader = csv::Reader::from_path(&vis_path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["alpha", "visibility", "theory_visibility"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let nu: f64 = row[1].parse().unwrap();
        let expected: f64 = row[2].parse().unwrap();
        assert!((nu - expected).abs() <= 1e-9);
    }
}

#[test]
fn json_metadata_args_reproduce_the_run() {
    let out = mzsim(&["run", "--variant", "quantum-delayed", "--alphas", "0.2,1.1", "--phi-steps", "7", "--format", "json", "--noise-p", "0.01"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["variant"], "quantum-delayed");
    assert_eq!(doc["points"].as_array().unwrap().len(), 14);
    let args: Vec<String> = serde_json::from_value(doc["metadata"]["args"].clone()).unwrap();
    let replay = Command::new(env!("CARGO_BIN_EXE_mzsim")).args(&args).args(["--format", "json"]).output().unwrap();
    assert_eq!(replay.stdout, out.stdout);
    let reparsed = parse_args(std::iter::once("mzsim".to_string()).chain(args)).unwrap();
    assert_eq!(reparsed.config.alphas, vec![0.2, 1.1]);
}

#[test]
fn parallel_sweep_matches_sequential_output() {
    for variant in [Variant::Open, Variant::Wheeler, Variant::QuantumDelayed] {
        let mut cfg = ExperimentConfig::new(variant, Mode::IdealGate);
        cfg.rng_seed = 3;
        cfg.n_shots = 400;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        emit_sweep_csv(&sweep(&cfg).unwrap(), &mut a).unwrap();
        emit_sweep_csv(&par_sweep(&cfg, Some(4)).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
    }
}
