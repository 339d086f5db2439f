//! Physical model: parameters, rover path, drones and charging slots.

pub mod config;
pub mod drone;
pub mod path;
pub mod slots;

pub use config::{ConfigError, MissionConfig};
pub use drone::{bearing, step_kinematics, wrap_heading, Action, DroneState, Mode, SlotId};
pub use path::{rover_position, PathError, Point, RoverPath};
pub use slots::{lattice_point, slot_positions, SlotSet};
