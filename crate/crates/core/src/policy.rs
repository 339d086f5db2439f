//! Heading policies for exploring drones.

use std::f64::consts::PI;

use crate::maps::LocalObservation;
use crate::model::wrap_heading;

/// Maps a drone's own observation to a normalised heading in [-1, 1).
pub trait Policy: Sync {
    fn heading(&self, obs: &LocalObservation) -> f64;
}

/// Greedy deficit-seeking policy: steer toward the centroid of uncovered free
/// cells, pushed away from obstacles (other drones and the comms boundary).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptedPolicy {
    /// Weight of obstacle repulsion relative to deficit attraction.
    pub repulsion: f64,
}

impl Default for ScriptedPolicy {
    fn default() -> Self {
        Self { repulsion: 2.0 }
    }
}

impl Policy for ScriptedPolicy {
    fn heading(&self, obs: &LocalObservation) -> f64 {
        let d = obs.size();
        let c = (d as f64 - 1.0) / 2.0;
        let (mut gx, mut gy) = (0.0, 0.0);
        for b in 0..d {
            for a in 0..d {
                let (dx, dy) = (a as f64 - c, b as f64 - c);
                let r = dx.hypot(dy);
                if r < 1e-9 {
                    continue;
                }
                let o = obs.obstacle(a, b);
                let w = (1.0 - obs.perception(a, b)) * (1.0 - o) - self.repulsion * o;
                gx += w * dx / r;
                gy += w * dy / r;
            }
        }
        if gx.hypot(gy) < 1e-12 {
            return 0.0;
        }
        wrap_heading(gy.atan2(gx) / PI)
    }
}
