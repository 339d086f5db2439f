//! Per-drone reward terms.

use serde::Serialize;

use crate::maps::{sensor_value, PerceptionMap};
use crate::model::{MissionConfig, Mode, Point};

/// Collision penalty, applied when another airborne drone is inside the safety radius.
pub const COLLISION_PENALTY: f64 = -200.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RewardTerms {
    pub r_c: f64,
    pub r_e: f64,
    pub r_p: f64,
    pub total: f64,
}

/// Map mass of one stationary sensing drone at steady state: the sensor
/// footprint summed over a grid whose lattice point sits under the drone.
pub fn baseline_map(cfg: &MissionConfig) -> f64 {
    let mut map = PerceptionMap::with_side(Point::default(), (2.0 * cfg.r_s / cfg.cell).ceil() as usize + 2, cfg.cell);
    map.stamp(Point::default(), Mode::Explore, cfg);
    map.sum()
}

/// Fleet coverage relative to `n` isolated stationary drones.
pub fn coverage_reward(sum_m: f64, n: usize, sum_m0: f64) -> f64 {
    let base = n as f64 * sum_m0;
    (sum_m - base) / base
}

/// Marginal mass drone `i` alone adds to the decayed map.
pub fn exploration_reward(decayed: &PerceptionMap, p: Point, cfg: &MissionConfig, floor: Option<&[f64]>) -> f64 {
    decayed.marginal_gain(p, cfg, floor)
}

/// Safety and connectivity penalty for drone `i`. Only airborne drones
/// collide; the collision branch wins over the connectivity branch.
pub fn penalty(i: usize, positions: &[Point], airborne: &[bool], rover: Point, cfg: &MissionConfig) -> f64 {
    let p = positions[i];
    let collides = airborne[i]
        && positions
            .iter()
            .zip(airborne)
            .enumerate()
            .any(|(j, (q, &air))| j != i && air && p.dist(*q) < cfg.r_o);
    if collides {
        return COLLISION_PENALTY;
    }
    let d = p.dist(rover);
    if d > cfg.r_c {
        -d
    } else {
        0.0
    }
}

pub fn combine(r_c: f64, r_e: f64, r_p: f64, cfg: &MissionConfig) -> RewardTerms {
    RewardTerms {
        r_c,
        r_e,
        r_p,
        total: cfg.omega_c * r_c + cfg.omega_e * r_e + r_p,
    }
}

/// Sensor response of a single drone at `q`, for oracles.
pub fn footprint(p: Point, q: Point, cfg: &MissionConfig) -> f64 {
    sensor_value(p.dist(q), Mode::Explore, cfg)
}
