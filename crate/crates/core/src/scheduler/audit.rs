//! Runtime check that every drone can still make it to a charging slot.

use std::fmt;

use crate::model::{DroneState, MissionConfig, Mode, SlotSet};

use super::instance::{deadline, travel_steps};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditCase {
    /// Consumed endurance exceeds the battery.
    Endurance,
    /// An exploring or returning drone can no longer reach its slot in time.
    Reachable,
    /// A returning or charging drone lost or changed its slot.
    Retained,
    /// A drone left the rover without a full battery.
    FreshDeparture,
    /// Slot occupancy disagrees with drone modes.
    Occupancy,
}

impl fmt::Display for AuditCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuditCase::Endurance => "endurance",
            AuditCase::Reachable => "slot-reachable",
            AuditCase::Retained => "slot-retained",
            AuditCase::FreshDeparture => "fresh-departure",
            AuditCase::Occupancy => "occupancy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("audit failure ({case}) for drone {drone}: {detail}")]
pub struct AuditFailure {
    pub drone: usize,
    pub case: AuditCase,
    pub detail: String,
}

/// Check the fleet after this step's mode updates and assignment. `prev` is
/// the fleet as it was at the start of the step.
pub fn audit_feasibility(prev: &[DroneState], fleet: &[DroneState], slots: &SlotSet, cfg: &MissionConfig) -> Result<(), AuditFailure> {
    let fail = |drone: usize, case: AuditCase, what: &str| AuditFailure {
        drone,
        case,
        detail: format!("{what}; before {:?}; after {:?}", prev[drone], fleet[drone]),
    };
    for (i, s) in fleet.iter().enumerate() {
        if s.t_i > cfg.t_a {
            return Err(fail(i, AuditCase::Endurance, &format!("t_i = {} > {}", s.t_i, cfg.t_a)));
        }
        let was = &prev[i];
        if was.mode == Mode::Charge && !was.is_docked() && s.mode == Mode::Explore && s.t_i != 0 {
            return Err(fail(i, AuditCase::FreshDeparture, "departed with t_i > 0"));
        }
        if s.is_docked() {
            continue;
        }
        let Some(id) = s.slot else {
            return Err(fail(i, AuditCase::Reachable, "no slot assigned"));
        };
        if matches!(was.mode, Mode::Return | Mode::Charge) && !was.is_docked() && s.mode != Mode::Explore && was.slot != s.slot {
            return Err(fail(i, AuditCase::Retained, "slot changed after locking"));
        }
        let Some(k) = slots.index_of(id) else {
            if s.mode == Mode::Charge {
                // the rover is rolling over this slot and releases the drone within eps
                continue;
            }
            return Err(fail(i, AuditCase::Reachable, &format!("slot {id} is behind the rover")));
        };
        match s.mode {
            Mode::Explore | Mode::Return => {
                let travel = travel_steps(s.p.dist(slots.positions[k]), cfg);
                let limit = deadline(slots, k, s.t_i, cfg);
                if travel > limit + 1e-9 {
                    return Err(fail(i, AuditCase::Reachable, &format!("needs {travel:.3} steps, deadline {limit:.3}")));
                }
            }
            Mode::Charge => {
                let d = s.p.dist(slots.positions[k]);
                if d > cfg.eps() {
                    return Err(fail(i, AuditCase::Retained, &format!("charging {d:.3} m from its slot")));
                }
            }
        }
        let locked = s.mode != Mode::Explore;
        if locked != (slots.occupancy[k] == Some(i)) {
            return Err(fail(i, AuditCase::Occupancy, &format!("slot {id} occupancy {:?}", slots.occupancy[k])));
        }
    }
    Ok(())
}
