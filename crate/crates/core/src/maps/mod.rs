//! Rover-centred perception and obstacle grids.

mod export;
mod grid;
mod info;
mod obstacle;
mod perception;

use thiserror::Error;

pub use export::{grid_to_csv, to_pgm, to_pgm_rect, value_map_from_csv};
pub use grid::GridGeom;
pub use info::{clip_local, fuse_value_map, InfoMap, LocalObservation, ValueMap};
pub use obstacle::{build_obstacle, ObstacleMap};
pub use perception::{apply_sensing, sensor_value, shift_map, PerceptionMap};

#[derive(Debug, Error)]
pub enum MapError {
    #[error("expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("value {value} at index {index} is outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },
    #[error("grid geometry: {0}")]
    Geometry(String),
    #[error("parse error: {0}")]
    Parse(String),
}
