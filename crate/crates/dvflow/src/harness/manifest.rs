use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// Everything needed to rerun an experiment bit-identically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    pub config_hash: String,
    pub seed: u64,
    pub git_describe: String,
    pub crate_version: String,
    pub tolerances: BTreeMap<String, f64>,
    pub config: serde_json::Value,
}

/// Hex SHA-256 of the compact JSON serialisation.
pub fn config_hash(config: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(config).expect("JSON values always serialise");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `git describe --always --dirty`, or "unknown" outside a work tree.
pub fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

impl Manifest {
    pub fn new(kind: &str, config: serde_json::Value, seed: u64, checks: &[super::Check]) -> Self {
        Manifest {
            kind: kind.into(),
            config_hash: config_hash(&config),
            seed,
            git_describe: git_describe(),
            crate_version: env!("CARGO_PKG_VERSION").into(),
            tolerances: checks.iter().map(|c| (c.name.clone(), c.tolerance)).collect(),
            config,
        }
    }
}
