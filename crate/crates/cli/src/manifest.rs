use std::path::PathBuf;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use subspace_rip::montecarlo::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// SHA-256 of the canonical config JSON.
    pub config_hash: String,
    pub master_seed: u64,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<PathBuf>,
}

/// Compact JSON with keys sorted at every level.
///
/// The config is first parsed into its typed form, so defaults, number
/// spelling and whitespace in the source file do not change the result.
pub fn canonical_json(cfg: &ExperimentConfig) -> String {
    // serde_json's map is ordered by key unless `preserve_order` is enabled.
    let value = serde_json::to_value(cfg).expect("config serializes");
    serde_json::to_string(&value).expect("value serializes")
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(canonical_json(cfg).as_bytes()))
}

fn stamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(cfg: &ExperimentConfig, started: DateTime<Utc>, outputs: Vec<PathBuf>) -> Self {
        RunManifest {
            tool_version: format!("subspace-rip {}", env!("CARGO_PKG_VERSION")),
            config_hash: config_hash(cfg),
            master_seed: cfg.master_seed,
            started_at: stamp(started),
            finished_at: stamp(Utc::now()),
            outputs,
        }
    }
}
