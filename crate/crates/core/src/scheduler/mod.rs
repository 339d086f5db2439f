//! Per-step assignment of exploring drones to charging slots.

mod audit;
mod hungarian;
mod instance;

use std::fmt;

use thiserror::Error;

pub use audit::{audit_feasibility, AuditCase, AuditFailure};
pub use hungarian::{brute_force, solve, Assignment};
pub use instance::{build_instance, build_instance_with, deadline, slack, travel_steps, AllocationInstance};

/// Which assignment constraint cannot be met.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// Some drone has no slot it can reach before its deadline.
    ReachabilityDeadline,
    /// Fewer free slots than drones.
    SlotCapacity,
    /// A group of drones shares too few reachable slots for each to get one.
    EveryDroneAssigned,
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfeasibleReason::ReachabilityDeadline => "reachability-deadline",
            InfeasibleReason::SlotCapacity => "slot-capacity",
            InfeasibleReason::EveryDroneAssigned => "every-drone-assigned",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("infeasible ({reason}): {detail}")]
    Infeasible { reason: InfeasibleReason, detail: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
}
