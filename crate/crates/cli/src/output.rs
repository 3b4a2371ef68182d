//! Files written by a run: report, trajectories, snapshots and manifest.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use acsim_core::io::{write_json, write_snapshot, write_trajectory_csv};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiments::{execute, Execution, Report};
use crate::outcome::{Assertion, Checked};

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub config_sha256: String,
    pub version: String,
    pub started_unix: u64,
    pub wall_time_seconds: f64,
    pub passed: bool,
    pub failures: Vec<Assertion>,
    pub files: Vec<String>,
}

/// SHA-256 of the resolved configuration serialized as compact JSON.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let text = serde_json::to_string(cfg).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn rel(dir: &Path, p: &Path) -> String {
    p.strip_prefix(dir).unwrap_or(p).to_string_lossy().into_owned()
}

/// Writes everything except the manifest; returns the written paths.
pub fn write_outputs(cfg: &ExperimentConfig, exec: &Execution) -> Result<Vec<PathBuf>, CliError> {
    let dir = &cfg.output_dir;
    let mut files = Vec::new();
    let path = dir.join("config.json");
    write_json(&path, cfg)?;
    files.push(path);
    let path = dir.join("report.json");
    write_json(&path, &exec.report)?;
    files.push(path);
    for (stem, traj) in &exec.trajectories {
        let path = dir.join(format!("{stem}.csv"));
        write_trajectory_csv(&path, traj)?;
        files.push(path);
        if cfg.write_snapshots {
            for (i, s) in traj.snapshots.iter().enumerate() {
                let path = dir.join("snapshots").join(format!("{stem}_{i:03}.bin"));
                write_snapshot(&path, &s.field, s.t)?;
                files.push(path);
            }
        }
    }
    Ok(files)
}

/// Runs the configured experiment and writes all outputs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Manifest, CliError> {
    run_and_report(cfg).map(|(m, _)| m)
}

/// Like [`run_experiment`], also returning the in-memory report.
pub fn run_and_report(cfg: &ExperimentConfig) -> Result<(Manifest, Report), CliError> {
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let exec = execute(cfg)?;
    let files = write_outputs(cfg, &exec)?;
    let manifest = Manifest {
        experiment: cfg.experiment.name().to_string(),
        config_sha256: config_hash(cfg),
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix,
        wall_time_seconds: clock.elapsed().as_secs_f64(),
        passed: exec.report.passed(),
        failures: exec.report.failures().into_iter().cloned().collect(),
        files: files.iter().map(|p| rel(&cfg.output_dir, p)).collect(),
    };
    write_json(&cfg.output_dir.join("manifest.json"), &manifest)?;
    Ok((manifest, exec.report))
}
