//! Mission parameters.
//!
//! One flat structure carries the physical model, grid resolution, learner
//! hyper-parameters and seeds. Defaults reproduce the reference experiment
//! (drone 5 m/s, rover 0.5 m/s, sensing 50 m, comms 200 m, ...). The JSON form
//! uses the same snake-case keys and rejects unknown keys.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissionConfig {
    // --- physical model ---
    /// Drone speed (m/s).
    pub v_a: f64,
    /// Rover speed (m/s).
    pub v_r: f64,
    /// Sensing range (m).
    pub r_s: f64,
    /// Communication range (m).
    pub r_c: f64,
    /// Safety radius (m).
    pub r_o: f64,
    /// Endurance, in steps.
    pub t_a: u32,
    /// Spacing between adjacent charging slots along the rover path (m).
    pub d_tau: f64,
    /// Peak sensing value.
    pub m_a: f64,
    /// Decay factor: the perception map loses `m_a / eta` per step.
    pub eta: f64,
    /// Grid resolution (m per cell).
    pub cell: f64,
    /// Step duration (s).
    pub dt: f64,
    /// Arrival threshold (m). Defaults to half a step length.
    pub eps: Option<f64>,
    /// Fleet size.
    pub n: usize,
    pub seed: u64,

    // --- learner ---
    /// Side of the square local observation after resampling.
    pub obs_size: usize,
    /// Width of both hidden layers of the actor and critic.
    pub hidden: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub omega_c: f64,
    pub omega_e: f64,
    pub sigma_start: f64,
    pub sigma_end: f64,
    pub batch_size: usize,
    pub replay_capacity: usize,
    pub episodes: usize,
    /// Multiplier applied to rewards before they enter the replay buffer.
    /// Learning curves always report unscaled rewards.
    pub reward_scale: f64,
    /// Smallest fleet drawn for a training episode; the largest is `n`.
    pub train_n_min: usize,

    // --- engine ---
    /// Route to the nearest free slot instead of aborting when the charging
    /// assignment has no feasible solution.
    pub infeasible_fallback: bool,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            v_a: 5.0,
            v_r: 0.5,
            r_s: 50.0,
            r_c: 200.0,
            r_o: 5.0,
            t_a: 100,
            d_tau: 5.0,
            m_a: 1.0,
            eta: 50.0,
            cell: 5.0,
            dt: 1.0,
            eps: None,
            n: 10,
            seed: 0,
            obs_size: 21,
            hidden: 128,
            alpha: 1e-4,
            beta: 1e-3,
            gamma: 0.95,
            omega_c: 20.0,
            omega_e: 1.0,
            sigma_start: 0.5,
            sigma_end: 0.05,
            batch_size: 64,
            replay_capacity: 50_000,
            episodes: 500,
            reward_scale: 0.01,
            train_n_min: 1,
            infeasible_fallback: false,
        }
    }
}

impl MissionConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// Distance a moving drone covers in one step (m).
    pub fn step_len(&self) -> f64 {
        self.v_a * self.dt
    }

    pub fn eps(&self) -> f64 {
        self.eps.unwrap_or(0.5 * self.step_len())
    }

    /// Per-step perception decay `m_a / eta`.
    pub fn decay(&self) -> f64 {
        self.m_a / self.eta
    }

    /// Number of charging slot candidates ahead of the rover.
    pub fn n_tau(&self) -> usize {
        let by_range = (self.r_c / self.d_tau + 1e-9).floor();
        let by_endurance = (self.t_a as f64 * self.step_len() / self.d_tau + 1e-9).floor();
        by_range.min(by_endurance).max(0.0) as usize
    }

    /// Time for the rover to advance one slot spacing, in steps.
    pub fn t_tau(&self) -> f64 {
        self.d_tau / (self.v_r * self.dt)
    }

    /// Side of the rover-centred perception map, in cells.
    pub fn grid_side(&self) -> usize {
        (2.0 * (self.r_s + self.r_c) / self.cell - 1e-9).ceil() as usize
    }

    /// Steps between consecutive launches at mission start.
    pub fn departure_interval(&self) -> usize {
        ((self.r_o / self.step_len()) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
            ConfigError::Invalid {
                field,
                reason: reason.into(),
            }
        }
        let positive: [(&'static str, f64); 9] = [
            ("v_a", self.v_a),
            ("v_r", self.v_r),
            ("r_s", self.r_s),
            ("r_c", self.r_c),
            ("r_o", self.r_o),
            ("d_tau", self.d_tau),
            ("m_a", self.m_a),
            ("cell", self.cell),
            ("dt", self.dt),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(field, format!("must be finite and > 0, got {value}")));
            }
        }
        if !(self.eta > 0.0) {
            return Err(invalid("eta", format!("must be > 0, got {}", self.eta)));
        }
        if self.t_a == 0 {
            return Err(invalid("t_a", "must be at least one step"));
        }
        if let Some(eps) = self.eps {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(invalid("eps", format!("must be finite and > 0, got {eps}")));
            }
        }
        if self.v_a <= self.v_r {
            return Err(invalid("v_a", format!("drone speed {} must exceed rover speed {}", self.v_a, self.v_r)));
        }
        if self.r_s >= self.r_c {
            return Err(invalid("r_s", format!("sensing range {} must be below comm range {}", self.r_s, self.r_c)));
        }
        if self.r_o >= self.r_s {
            return Err(invalid("r_o", format!("safety radius {} must be below sensing range {}", self.r_o, self.r_s)));
        }
        if self.n == 0 {
            return Err(invalid("n", "fleet must contain at least one drone"));
        }
        if self.n_tau() <= self.n {
            return Err(invalid(
                "n",
                format!("slot candidate count {} must exceed fleet size {}", self.n_tau(), self.n),
            ));
        }
        if self.obs_size == 0 {
            return Err(invalid("obs_size", "must be > 0"));
        }
        if self.hidden == 0 {
            return Err(invalid("hidden", "must be > 0"));
        }
        if self.batch_size == 0 {
            return Err(invalid("batch_size", "must be > 0"));
        }
        if self.replay_capacity < self.batch_size {
            return Err(invalid("replay_capacity", "must hold at least one batch"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(invalid("gamma", format!("must lie in [0, 1], got {}", self.gamma)));
        }
        for (field, value) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("sigma_start", self.sigma_start),
            ("sigma_end", self.sigma_end),
            ("reward_scale", self.reward_scale),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(invalid(field, format!("must be finite and >= 0, got {value}")));
            }
        }
        if self.train_n_min == 0 || self.train_n_min > self.n {
            return Err(invalid("train_n_min", format!("must lie in 1..={}", self.n)));
        }
        Ok(())
    }
}
