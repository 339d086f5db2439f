//! Coverage metrics: accumulated effective coverage E, cumulative coverage
//! ratio over the mission area, and average instantaneous coverage ratio.

use serde::Serialize;

use crate::maps::{sensor_value, PerceptionMap};
use crate::model::{MissionConfig, Mode, Point};

/// Dense grid on the shared world lattice covering a fixed bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldGrid {
    pub min_ix: i64,
    pub min_iy: i64,
    pub width: usize,
    pub height: usize,
    pub cell: f64,
    pub values: Vec<f64>,
}

impl WorldGrid {
    /// Grid covering every point within `margin` of `points`.
    pub fn around(points: &[Point], margin: f64, cell: f64) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        if points.is_empty() {
            (x0, y0, x1, y1) = (0.0, 0.0, 0.0, 0.0);
        }
        let min_ix = ((x0 - margin) / cell).floor() as i64;
        let min_iy = ((y0 - margin) / cell).floor() as i64;
        let width = (((x1 + margin) / cell).ceil() as i64 - min_ix).max(1) as usize;
        let height = (((y1 + margin) / cell).ceil() as i64 - min_iy).max(1) as usize;
        Self {
            min_ix,
            min_iy,
            width,
            height,
            cell,
            values: vec![0.0; width * height],
        }
    }

    pub fn index(&self, ix: i64, iy: i64) -> Option<usize> {
        let c = ix - self.min_ix;
        let r = iy - self.min_iy;
        (c >= 0 && r >= 0 && (c as usize) < self.width && (r as usize) < self.height).then(|| r as usize * self.width + c as usize)
    }

    pub fn center(&self, idx: usize) -> Point {
        let ix = self.min_ix + (idx % self.width) as i64;
        let iy = self.min_iy + (idx / self.width) as i64;
        Point::new((ix as f64 + 0.5) * self.cell, (iy as f64 + 0.5) * self.cell)
    }

    /// Inclusive index ranges of cells whose centres may lie within `r` of `p`.
    fn disc_ranges(&self, p: Point, r: f64) -> Option<(i64, i64, i64, i64)> {
        let c0 = (((p.x - r) / self.cell - 0.5).floor() as i64).max(self.min_ix);
        let c1 = (((p.x + r) / self.cell - 0.5).ceil() as i64).min(self.min_ix + self.width as i64 - 1);
        let r0 = (((p.y - r) / self.cell - 0.5).floor() as i64).max(self.min_iy);
        let r1 = (((p.y + r) / self.cell - 0.5).ceil() as i64).min(self.min_iy + self.height as i64 - 1);
        (c0 <= c1 && r0 <= r1).then_some((c0, c1, r0, r1))
    }

    /// Mean value over cells whose centres lie within `r` of `p`.
    pub fn mean_in_disc(&self, p: Point, r: f64) -> f64 {
        let Some((c0, c1, r0, r1)) = self.disc_ranges(p, r) else {
            return 0.0;
        };
        let (mut sum, mut count) = (0.0, 0usize);
        for iy in r0..=r1 {
            for ix in c0..=c1 {
                let q = Point::new((ix as f64 + 0.5) * self.cell, (iy as f64 + 0.5) * self.cell);
                if q.dist(p) <= r {
                    sum += self.values[self.index(ix, iy).unwrap()];
                    count += 1;
                }
            }
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}

/// Effective-coverage field of one drone, with the list of nonzero cells so
/// decay touches only those.
#[derive(Debug, Clone)]
struct EffectiveField {
    values: Vec<f64>,
    active: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MetricsReport {
    pub steps: usize,
    /// Accumulated effective coverage, averaged over steps (cell units).
    pub effective_coverage: f64,
    pub gamma_cum: f64,
    pub gamma_avg: f64,
    pub gamma_cum_series: Vec<f64>,
    pub gamma_avg_series: Vec<f64>,
    /// Cells within comms range of the rover at some point of the mission.
    pub feasible_cells: usize,
    #[serde(skip)]
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone)]
pub struct Metrics {
    cfg: MissionConfig,
    running_max: WorldGrid,
    feasible: Vec<bool>,
    feasible_count: usize,
    covered_sum: f64,
    effective: Vec<EffectiveField>,
    effective_total: f64,
    avg_total: f64,
    report: MetricsReport,
}

impl Metrics {
    /// `rover_track` lists every rover position of the mission; the feasible
    /// area is their union of comms discs.
    pub fn new(cfg: &MissionConfig, rover_track: &[Point], n: usize) -> Self {
        let running_max = WorldGrid::around(rover_track, 2.0 * (cfg.r_c + cfg.r_s), cfg.cell);
        let mut feasible = vec![false; running_max.values.len()];
        let mut last: Option<Point> = None;
        for &p in rover_track {
            if last.is_some_and(|q| q == p) {
                continue;
            }
            last = Some(p);
            if let Some((c0, c1, r0, r1)) = running_max.disc_ranges(p, cfg.r_c) {
                for iy in r0..=r1 {
                    for ix in c0..=c1 {
                        let idx = running_max.index(ix, iy).unwrap();
                        if !feasible[idx] && running_max.center(idx).dist(p) <= cfg.r_c {
                            feasible[idx] = true;
                        }
                    }
                }
            }
        }
        let feasible_count = feasible.iter().filter(|&&f| f).count();
        let blank = EffectiveField {
            values: vec![0.0; running_max.values.len()],
            active: Vec::new(),
        };
        Self {
            cfg: cfg.clone(),
            feasible,
            feasible_count,
            covered_sum: 0.0,
            effective: vec![blank; n],
            effective_total: 0.0,
            avg_total: 0.0,
            report: MetricsReport {
                feasible_cells: feasible_count,
                ..MetricsReport::default()
            },
            running_max,
        }
    }

    /// Record one step: `map` after sensing, the rover position, and the
    /// positions of drones that sensed this step (by fleet index).
    pub fn record(&mut self, map: &PerceptionMap, rover: Point, sensing: &[(usize, Point)]) {
        let cfg = &self.cfg;
        let geom = *map.geom();
        let values = map.values();

        // running max only rises where someone sensed
        for &(_, p) in sensing {
            let Some((c0, c1, r0, r1)) = geom.disc_bounds(p, cfg.r_s) else {
                continue;
            };
            for row in r0..=r1 {
                for col in c0..=c1 {
                    let (ix, iy) = geom.world_index(col, row);
                    let Some(w) = self.running_max.index(ix, iy) else {
                        continue;
                    };
                    let m = values[geom.index(col, row)];
                    let old = self.running_max.values[w];
                    if m > old {
                        self.running_max.values[w] = m;
                        if self.feasible[w] {
                            self.covered_sum += m - old;
                        }
                    }
                }
            }
        }
        let gamma_cum = if self.feasible_count == 0 {
            0.0
        } else {
            (self.covered_sum / (cfg.m_a * self.feasible_count as f64)).clamp(0.0, 1.0)
        };

        let (mut disc_sum, mut disc_count) = (0.0, 0usize);
        if let Some((c0, c1, r0, r1)) = geom.disc_bounds(rover, cfg.r_c) {
            for row in r0..=r1 {
                for col in c0..=c1 {
                    if geom.cell_center(col, row).dist(rover) <= cfg.r_c {
                        disc_sum += values[geom.index(col, row)];
                        disc_count += 1;
                    }
                }
            }
        }
        let gamma_now = if disc_count == 0 { 0.0 } else { disc_sum / (cfg.m_a * disc_count as f64) };
        self.avg_total += gamma_now;

        let decay = cfg.decay();
        let mut sensing_by_drone: Vec<Option<Point>> = vec![None; self.effective.len()];
        for &(i, p) in sensing {
            sensing_by_drone[i] = Some(p);
        }
        for (field, sensed) in self.effective.iter_mut().zip(sensing_by_drone) {
            let EffectiveField { values, active } = field;
            active.retain(|&idx| {
                values[idx] = (values[idx] - decay).max(0.0);
                values[idx] > 0.0
            });
            if let Some(p) = sensed {
                if let Some((c0, c1, r0, r1)) = self.running_max.disc_ranges(p, cfg.r_s) {
                    for iy in r0..=r1 {
                        for ix in c0..=c1 {
                            let idx = self.running_max.index(ix, iy).unwrap();
                            let e = sensor_value(self.running_max.center(idx).dist(p), Mode::Explore, cfg);
                            if e > values[idx] {
                                if values[idx] == 0.0 {
                                    active.push(idx);
                                }
                                values[idx] = e;
                            }
                        }
                    }
                }
            }
            self.effective_total += active.iter().map(|&idx| values[idx]).sum::<f64>();
        }

        self.report.steps += 1;
        self.report.gamma_cum_series.push(gamma_cum);
        self.report.gamma_avg_series.push(gamma_now);
    }

    pub fn running_max(&self) -> &WorldGrid {
        &self.running_max
    }

    pub fn report(&self) -> MetricsReport {
        let mut r = self.report.clone();
        if r.steps > 0 {
            let t = r.steps as f64;
            r.gamma_cum = *r.gamma_cum_series.last().unwrap();
            r.gamma_avg = self.avg_total / t;
            r.effective_coverage = self.effective_total / t;
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_drones_gives_zero() {
        let cfg = MissionConfig::default();
        let map = PerceptionMap::new(&cfg, Point::default());
        let mut m = Metrics::new(&cfg, &[Point::default()], 2);
        for _ in 0..5 {
            m.record(&map, Point::default(), &[]);
        }
        let r = m.report();
        assert_eq!((r.gamma_cum, r.gamma_avg, r.effective_coverage), (0.0, 0.0, 0.0));
    }

    #[test]
    fn saturated_map_gives_one() {
        let cfg = MissionConfig::default();
        let mut map = PerceptionMap::new(&cfg, Point::default());
        map.fill(cfg.m_a);
        let mut m = Metrics::new(&cfg, &[Point::default()], 1);
        // sensing everywhere is what raises the running max; sweep a drone over the disc
        let mut sensing = Vec::new();
        for iy in -45..=45 {
            for ix in -45..=45 {
                sensing.push((0, Point::new(ix as f64 * 5.0, iy as f64 * 5.0)));
            }
        }
        m.record(&map, Point::default(), &sensing);
        let r = m.report();
        assert!((r.gamma_cum - 1.0).abs() < 1e-12);
        assert!((r.gamma_avg - 1.0).abs() < 1e-12);
    }

    #[test]
    fn static_fleet_without_decay_keeps_initial_mass() {
        let cfg = MissionConfig {
            eta: f64::INFINITY,
            ..MissionConfig::default()
        };
        let p = Point::new(12.0, -3.0);
        let mut map = PerceptionMap::new(&cfg, Point::default());
        let mut m = Metrics::new(&cfg, &[Point::default()], 1);
        for _ in 0..7 {
            map.stamp(p, Mode::Explore, &cfg);
            m.record(&map, Point::default(), &[(0, p)]);
        }
        let one_step = {
            let mut fresh = PerceptionMap::new(&cfg, Point::default());
            fresh.stamp(p, Mode::Explore, &cfg);
            fresh.sum()
        };
        assert!((m.report().effective_coverage - one_step).abs() < 1e-9);
    }

    #[test]
    fn world_grid_disc_mean() {
        let mut g = WorldGrid::around(&[Point::default()], 20.0, 5.0);
        for (i, v) in g.values.iter_mut().enumerate() {
            *v = (i % 2) as f64;
        }
        let mean = g.mean_in_disc(Point::default(), 1000.0);
        assert!(mean > 0.4 && mean < 0.6);
        assert_eq!(g.mean_in_disc(Point::new(1e5, 0.0), 1.0), 0.0);
    }
}
