use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::agent::{layer_sizes, ActorCritic};
use super::mlp::{Head, Mlp};
use crate::model::MissionConfig;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("cannot access checkpoint {path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed checkpoint: {0}")]
    Parse(String),
    #[error("checkpoint version {found} is not supported (expected {CHECKPOINT_VERSION})")]
    Version { found: u32 },
    #[error("checkpoint layers {found:?} do not match configured {expected:?}")]
    Shape { expected: Vec<usize>, found: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetRecord {
    pub sizes: Vec<usize>,
    pub head: Head,
    pub params: Vec<f64>,
}

impl From<&Mlp> for NetRecord {
    fn from(m: &Mlp) -> Self {
        Self {
            sizes: m.sizes().to_vec(),
            head: m.head(),
            params: m.params().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub seed: u64,
    /// Episodes completed.
    pub episode: usize,
    pub sigma: f64,
    pub actor: NetRecord,
    pub critic: NetRecord,
}

impl Checkpoint {
    pub fn new(agent: &ActorCritic, episode: usize, seed: u64) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            seed,
            episode,
            sigma: agent.sigma,
            actor: (&agent.actor).into(),
            critic: (&agent.critic).into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CheckpointError> {
        #[derive(Deserialize)]
        struct Probe {
            version: u32,
        }
        let probe: Probe = serde_json::from_str(text).map_err(|e| CheckpointError::Parse(e.to_string()))?;
        if probe.version != CHECKPOINT_VERSION {
            return Err(CheckpointError::Version { found: probe.version });
        }
        serde_json::from_str(text).map_err(|e| CheckpointError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        let text = std::fs::read_to_string(path).map_err(|source| CheckpointError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        std::fs::write(path, self.to_json()).map_err(|source| CheckpointError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Rebuild the agent, checking layer shapes against `cfg`. Learning rates
    /// come from `cfg`.
    pub fn to_agent(&self, cfg: &MissionConfig) -> Result<ActorCritic, CheckpointError> {
        let expected = layer_sizes(cfg);
        let net = |rec: &NetRecord, head: Head| -> Result<Mlp, CheckpointError> {
            if rec.sizes != expected {
                return Err(CheckpointError::Shape {
                    expected: expected.clone(),
                    found: rec.sizes.clone(),
                });
            }
            if rec.head != head {
                return Err(CheckpointError::Parse(format!("unexpected {:?} head", rec.head)));
            }
            Mlp::from_parts(rec.sizes.clone(), rec.head, rec.params.clone())
                .ok_or_else(|| CheckpointError::Parse("parameter count or values invalid".into()))
        };
        Ok(ActorCritic {
            actor: net(&self.actor, Head::Tanh)?,
            critic: net(&self.critic, Head::Linear)?,
            alpha: cfg.alpha,
            beta: cfg.beta,
            gamma: cfg.gamma,
            sigma: self.sigma,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cacer::trainer::initial_agent;

    fn cfg() -> MissionConfig {
        MissionConfig {
            obs_size: 4,
            hidden: 5,
            ..MissionConfig::default()
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let cfg = cfg();
        let agent = initial_agent(&cfg);
        let ck = Checkpoint::new(&agent, 7, cfg.seed);
        let back = Checkpoint::from_json(&ck.to_json()).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.to_agent(&cfg).unwrap(), agent);
    }

    #[test]
    fn shape_and_version_errors() {
        let cfg = cfg();
        let ck = Checkpoint::new(&initial_agent(&cfg), 0, 0);
        let other = MissionConfig { hidden: 6, ..cfg.clone() };
        assert!(matches!(ck.to_agent(&other), Err(CheckpointError::Shape { .. })));
        let mut v2 = ck.clone();
        v2.version = 2;
        assert!(matches!(Checkpoint::from_json(&v2.to_json()), Err(CheckpointError::Version { found: 2 })));
        assert!(matches!(Checkpoint::from_json("{"), Err(CheckpointError::Parse(_))));
    }
}
