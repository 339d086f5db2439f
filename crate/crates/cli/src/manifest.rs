//! Run manifests: enough to re-run a command and check its inputs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sc2_core::model::MissionConfig;

use crate::Command;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    /// sha256 of the config as JSON with sorted keys.
    pub config_digest: String,
    pub seeds: Vec<u64>,
    /// The command as run, with absolute input paths.
    pub command: Command,
    pub inputs: Vec<InputFile>,
    pub outputs: Vec<String>,
    pub wall_clock_secs: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest that ignores key order and formatting of the source file.
pub fn config_digest(cfg: &MissionConfig) -> String {
    // serde_json maps are ordered by key, so this text is canonical
    let value = serde_json::to_value(cfg).expect("config serializes");
    sha256_hex(value.to_string().as_bytes())
}

pub fn input_file(path: &Path) -> anyhow::Result<InputFile> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(InputFile {
        path: path.to_path_buf(),
        sha256: sha256_hex(&bytes),
    })
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(dir.join(MANIFEST_FILE), text + "\n").with_context(|| format!("writing manifest in {}", dir.display()))
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_key_order() {
        let a = MissionConfig::from_json_str(r#"{"n": 4, "seed": 9}"#).unwrap();
        let b = MissionConfig::from_json_str(r#"{"seed": 9,
            "n": 4}"#)
        .unwrap();
        assert_eq!(config_digest(&a), config_digest(&b));
        let c = MissionConfig { seed: 10, ..a };
        assert_ne!(config_digest(&b), config_digest(&c));
    }
}
