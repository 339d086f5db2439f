//! Charging slot candidates along the rover path.
//!
//! Slots sit on a fixed lattice of arc lengths `id * d_tau`, so a drone that
//! lands on one stays put while the rover approaches. At step `t` the
//! candidates are the `n_tau` lattice points strictly ahead of the rover;
//! candidate `k` (1-based) lies within `((k-1) d_tau, k d_tau]` of the rover
//! and exactly at `k d_tau` whenever the rover stands on a lattice point.

use serde::{Deserialize, Serialize};

use super::config::MissionConfig;
use super::drone::SlotId;
use super::path::{Point, RoverPath};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotSet {
    pub n_tau: usize,
    pub ids: Vec<SlotId>,
    pub positions: Vec<Point>,
    /// Arc length of each slot along the path, before clamping.
    pub arc: Vec<f64>,
    /// Steps until the rover rolls over each slot. Infinite for slots at the
    /// path end, where the rover parks.
    pub rover_eta: Vec<f64>,
    /// Occupying (returning or charging) drone per slot.
    pub occupancy: Vec<Option<usize>>,
}

impl SlotSet {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Candidate index (0-based) of a slot id, if it is still ahead of the rover.
    pub fn index_of(&self, id: SlotId) -> Option<usize> {
        let first = self.ids.first()?.0;
        let k = id.0.checked_sub(first)? as usize;
        (k < self.ids.len()).then_some(k)
    }

    pub fn position_of(&self, id: SlotId) -> Option<Point> {
        self.index_of(id).map(|k| self.positions[k])
    }

    pub fn is_free(&self, k: usize) -> bool {
        self.occupancy[k].is_none()
    }
}

/// Location of a lattice slot, wherever the rover currently is.
pub fn lattice_point(path: &RoverPath, id: SlotId, cfg: &MissionConfig) -> Point {
    path.point_at(id.0 as f64 * cfg.d_tau)
}

pub fn slot_positions(path: &RoverPath, t: usize, cfg: &MissionConfig) -> SlotSet {
    let s_rover = path.arc_at_step(t, cfg);
    let len = path.length();
    let n_tau = cfg.n_tau();
    let base = (s_rover / cfg.d_tau + 1e-9).floor() as u32;
    let mut set = SlotSet {
        n_tau,
        ids: Vec::with_capacity(n_tau),
        positions: Vec::with_capacity(n_tau),
        arc: Vec::with_capacity(n_tau),
        rover_eta: Vec::with_capacity(n_tau),
        occupancy: vec![None; n_tau],
    };
    for k in 1..=n_tau as u32 {
        let id = SlotId(base + k);
        let arc = id.0 as f64 * cfg.d_tau;
        set.ids.push(id);
        set.positions.push(path.point_at(arc));
        set.arc.push(arc);
        let eta = if arc >= len {
            f64::INFINITY
        } else {
            (arc - s_rover) / (cfg.v_r * cfg.dt)
        };
        set.rover_eta.push(eta);
    }
    set
}
