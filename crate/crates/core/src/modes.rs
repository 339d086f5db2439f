//! The Explore -> Return -> Charge ring and per-mode action dispatch.

use serde::Serialize;
use thiserror::Error;

use crate::maps::LocalObservation;
use crate::model::{bearing, Action, DroneState, MissionConfig, Mode, Point};
use crate::policy::Policy;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModeError {
    #[error("drone in {0} mode has no assigned slot")]
    MissingSlot(Mode),
    #[error("exploring drone needs an observation")]
    MissingObservation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeTransitionEvent {
    pub step: usize,
    pub drone: usize,
    pub from: Mode,
    pub to: Mode,
    /// Distance to the slot, or to the rover when leaving Charge (m).
    pub distance: f64,
    /// Consumed endurance before the transition (steps).
    pub t_i: u32,
    /// Remaining endurance minus the return margin minus travel time (steps).
    pub margin: f64,
}

impl ModeTransitionEvent {
    /// Event describing `before -> after`, if the mode changed.
    pub fn between(
        step: usize,
        drone: usize,
        before: &DroneState,
        after: &DroneState,
        slot_pos: Option<Point>,
        rover_pos: Point,
        cfg: &MissionConfig,
    ) -> Option<Self> {
        if before.mode == after.mode {
            return None;
        }
        let distance = match before.mode {
            Mode::Charge => before.p.dist(rover_pos),
            _ => slot_pos.map_or(f64::NAN, |q| before.p.dist(q)),
        };
        Some(Self {
            step,
            drone,
            from: before.mode,
            to: after.mode,
            distance,
            t_i: before.t_i,
            margin: return_margin(before.t_i, distance, cfg),
        })
    }
}

/// Steps to spare before the return trigger fires; negative once it has.
pub fn return_margin(t_i: u32, distance: f64, cfg: &MissionConfig) -> f64 {
    (cfg.t_a as f64 - t_i as f64 - 2.0) - distance / cfg.step_len()
}

/// Apply at most one ring transition. A docked drone (charging without a
/// slot) is left alone; the engine launches it.
pub fn update_mode(s: &DroneState, slot_pos: Option<Point>, rover_pos: Point, cfg: &MissionConfig) -> Result<DroneState, ModeError> {
    if s.is_docked() {
        return Ok(*s);
    }
    let slot = slot_pos.ok_or(ModeError::MissingSlot(s.mode))?;
    let mut next = *s;
    match s.mode {
        Mode::Explore => {
            if return_margin(s.t_i, s.p.dist(slot), cfg) < 0.0 {
                next.mode = Mode::Return;
            }
        }
        Mode::Return => {
            if s.p.dist(slot) < cfg.eps() {
                next.mode = Mode::Charge;
                next.p = slot;
            }
        }
        Mode::Charge => {
            if s.p.dist(rover_pos) < cfg.eps() {
                next.mode = Mode::Explore;
                next.t_i = 0;
                next.slot = None;
            }
        }
    }
    Ok(next)
}

pub fn select_action(
    s: &DroneState,
    obs: Option<&LocalObservation>,
    policy: &dyn Policy,
    slot_pos: Option<Point>,
) -> Result<Action, ModeError> {
    match s.mode {
        Mode::Explore => {
            let obs = obs.ok_or(ModeError::MissingObservation)?;
            Ok(Action::Heading(policy.heading(obs)))
        }
        Mode::Return => {
            let slot = slot_pos.ok_or(ModeError::MissingSlot(Mode::Return))?;
            Ok(Action::Heading(bearing(s.p, slot)))
        }
        Mode::Charge => Ok(Action::Park),
    }
}
