//! Perception map: decayed record of how well each cell has been sensed.

use crate::model::{DroneState, MissionConfig, Mode, Point};

use super::grid::GridGeom;

/// Hill-shaped sensor response at distance `c`: `m_a / r_s^4 * (c^2 - r_s^2)^2`
/// inside the sensing range, zero outside or while charging.
pub fn sensor_value(c: f64, mode: Mode, cfg: &MissionConfig) -> f64 {
    if mode == Mode::Charge || !(c <= cfg.r_s) {
        return 0.0;
    }
    // (r_s - c)(r_s + c) keeps precision near the rim
    let u = (cfg.r_s - c) * (cfg.r_s + c) / (cfg.r_s * cfg.r_s);
    cfg.m_a * u * u
}

/// Rover-centred grid of side `2 (r_s + r_c)` holding values in `[0, m_a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionMap {
    origin: Point,
    geom: GridGeom,
    values: Vec<f64>,
}

impl PerceptionMap {
    pub fn new(cfg: &MissionConfig, origin: Point) -> Self {
        Self::with_side(origin, cfg.grid_side(), cfg.cell)
    }

    pub fn with_side(origin: Point, side: usize, cell: f64) -> Self {
        let geom = GridGeom::centered(origin, side, cell);
        Self {
            origin,
            geom,
            values: vec![0.0; geom.len()],
        }
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn geom(&self) -> &GridGeom {
        &self.geom
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[self.geom.index(col, row)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn fill(&mut self, v: f64) {
        self.values.fill(v);
    }

    /// Subtract `amount` from every cell, flooring at zero.
    pub fn decay(&mut self, amount: f64) {
        if amount <= 0.0 {
            return;
        }
        for v in &mut self.values {
            *v = (*v - amount).max(0.0);
        }
    }

    /// Raise every cell in range of `p` to at least the sensor response.
    pub fn stamp(&mut self, p: Point, mode: Mode, cfg: &MissionConfig) {
        if mode == Mode::Charge {
            return;
        }
        let Some((c0, c1, r0, r1)) = self.geom.disc_bounds(p, cfg.r_s) else {
            return;
        };
        for row in r0..=r1 {
            for col in c0..=c1 {
                let e = sensor_value(self.geom.cell_center(col, row).dist(p), mode, cfg);
                let v = &mut self.values[row * self.geom.side + col];
                if e > *v {
                    *v = e;
                }
            }
        }
    }

    /// Mass a single sensing drone at `p` would add on top of this map,
    /// where each cell reads as at least `floor[idx]` when a floor is given.
    pub fn marginal_gain(&self, p: Point, cfg: &MissionConfig, floor: Option<&[f64]>) -> f64 {
        let Some((c0, c1, r0, r1)) = self.geom.disc_bounds(p, cfg.r_s) else {
            return 0.0;
        };
        let mut gain = 0.0;
        for row in r0..=r1 {
            for col in c0..=c1 {
                let idx = row * self.geom.side + col;
                let e = sensor_value(self.geom.cell_center(col, row).dist(p), Mode::Explore, cfg);
                let current = match floor {
                    Some(f) => self.values[idx].max(f[idx]),
                    None => self.values[idx],
                };
                if e > current {
                    gain += e - current;
                }
            }
        }
        gain
    }

    /// Follow the rover by `delta`. Contents move by whole cells only; the
    /// continuous origin carries the sub-cell remainder. Exposed cells read 0.
    pub fn shift(&mut self, delta: Point) {
        self.origin = self.origin + delta;
        let next = GridGeom::centered(self.origin, self.geom.side, self.geom.cell);
        let dx = next.min_ix - self.geom.min_ix;
        let dy = next.min_iy - self.geom.min_iy;
        if dx == 0 && dy == 0 {
            return;
        }
        let side = self.geom.side as i64;
        let mut shifted = vec![0.0; self.values.len()];
        for row in 0..side {
            let src_row = row + dy;
            if !(0..side).contains(&src_row) {
                continue;
            }
            for col in 0..side {
                let src_col = col + dx;
                if (0..side).contains(&src_col) {
                    shifted[(row * side + col) as usize] = self.values[(src_row * side + src_col) as usize];
                }
            }
        }
        self.values = shifted;
        self.geom = next;
    }
}

/// One simulation step of sensing: a single decay of `m_a / eta`, then each
/// non-charging drone raises the cells it covers.
pub fn apply_sensing(map: &mut PerceptionMap, drones: &[DroneState], cfg: &MissionConfig) {
    map.decay(cfg.decay());
    for d in drones {
        map.stamp(d.p, d.mode, cfg);
    }
}

/// Shifted copy of `map`.
pub fn shift_map(map: &PerceptionMap, delta: Point) -> PerceptionMap {
    let mut out = map.clone();
    out.shift(delta);
    out
}
