//! Drone state and constant-speed kinematics.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::MissionConfig;
use super::path::Point;

/// Operating mode. Transitions only run Explore -> Return -> Charge -> Explore.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Explore,
    Return,
    Charge,
}

impl Mode {
    /// The only mode reachable from `self`.
    pub fn successor(self) -> Mode {
        match self {
            Mode::Explore => Mode::Return,
            Mode::Return => Mode::Charge,
            Mode::Charge => Mode::Explore,
        }
    }

    pub fn is_airborne(self) -> bool {
        self != Mode::Charge
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Explore => "explore",
            Mode::Return => "return",
            Mode::Charge => "charge",
        })
    }
}

/// Index of a charging slot on the fixed lattice `id * d_tau` along the rover path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SlotId(pub u32);

impl fmt::Display for SlotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DroneState {
    pub p: Point,
    /// Last commanded heading, normalised to [-1, 1) (multiply by pi for radians).
    pub psi: f64,
    /// Consumed endurance, in steps.
    pub t_i: u32,
    pub mode: Mode,
    pub slot: Option<SlotId>,
}

impl DroneState {
    pub fn new(p: Point, mode: Mode) -> Self {
        Self {
            p,
            psi: 0.0,
            t_i: 0,
            mode,
            slot: None,
        }
    }

    /// A drone parked on the rover before launch: charging, no slot.
    pub fn docked(p: Point) -> Self {
        Self::new(p, Mode::Charge)
    }

    pub fn is_docked(&self) -> bool {
        self.mode == Mode::Charge && self.slot.is_none()
    }
}

/// Control output for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    Heading(f64),
    Park,
}

/// Wrap any value onto the circle [-1, 1).
pub fn wrap_heading(psi: f64) -> f64 {
    let w = (psi + 1.0).rem_euclid(2.0) - 1.0;
    // rem_euclid can round up to exactly 2.0 for tiny negative inputs
    if w >= 1.0 {
        -1.0
    } else {
        w
    }
}

/// Normalised bearing from `from` towards `to`.
pub fn bearing(from: Point, to: Point) -> f64 {
    let d = to - from;
    wrap_heading(d.y.atan2(d.x) / PI)
}

/// One step at constant speed along `psi_cmd`. Charging drones stay parked
/// and do not consume endurance.
pub fn step_kinematics(s: &DroneState, psi_cmd: f64, cfg: &MissionConfig) -> DroneState {
    if s.mode == Mode::Charge {
        return *s;
    }
    let angle = PI * psi_cmd;
    let step = cfg.step_len();
    DroneState {
        p: Point::new(s.p.x + step * angle.cos(), s.p.y + step * angle.sin()),
        psi: psi_cmd,
        t_i: s.t_i + 1,
        ..*s
    }
}
