//! The stacked information map, value-map fusion and drone-centred clipping.

use crate::model::{MissionConfig, Point};

use super::grid::GridGeom;
use super::obstacle::ObstacleMap;
use super::perception::PerceptionMap;
use super::MapError;

#[derive(Debug, Clone, PartialEq)]
pub struct InfoMap {
    pub perception: PerceptionMap,
    pub obstacle: ObstacleMap,
    /// `m_a * (1 - V)` per cell when a value layer has been fused.
    floor: Option<Vec<f64>>,
}

impl InfoMap {
    pub fn new(perception: PerceptionMap, obstacle: ObstacleMap) -> Result<Self, MapError> {
        if perception.geom() != obstacle.geom() {
            return Err(MapError::Geometry("perception and obstacle grids differ".into()));
        }
        Ok(Self {
            perception,
            obstacle,
            floor: None,
        })
    }

    pub fn geom(&self) -> &GridGeom {
        self.perception.geom()
    }

    pub fn floor(&self) -> Option<&[f64]> {
        self.floor.as_deref()
    }

    /// Perception as the policy sees it: the raw value, raised to the value floor.
    pub fn effective(&self, idx: usize) -> f64 {
        let m = self.perception.values()[idx];
        match &self.floor {
            Some(f) => m.max(f[idx]),
            None => m,
        }
    }

    pub fn effective_sum(&self) -> f64 {
        match &self.floor {
            Some(f) => self.perception.values().iter().zip(f).map(|(m, f)| m.max(*f)).sum(),
            None => self.perception.sum(),
        }
    }
}

/// Fuse a value layer `v` (same geometry as the map, entries in `[0, 1]`) so
/// that low-value terrain reads as already covered.
pub fn fuse_value_map(mut info: InfoMap, v: &[f64], cfg: &MissionConfig) -> Result<InfoMap, MapError> {
    let expected = info.geom().len();
    if v.len() != expected {
        return Err(MapError::Shape { expected, got: v.len() });
    }
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
        return Err(MapError::ValueOutOfRange { index, value });
    }
    info.floor = Some(v.iter().map(|&x| cfg.m_a * (1.0 - x)).collect());
    Ok(info)
}

/// Terrain-importance grid on the world lattice of its own cell size.
/// Cells outside the grid count as full value.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueMap {
    /// World coordinates of the lower-left corner of cell (0, 0).
    pub x0: f64,
    pub y0: f64,
    pub cell: f64,
    pub width: usize,
    pub height: usize,
    /// Row-major, row 0 at the bottom.
    pub values: Vec<f64>,
}

impl ValueMap {
    pub fn new(x0: f64, y0: f64, cell: f64, width: usize, height: usize, values: Vec<f64>) -> Result<Self, MapError> {
        if !(cell > 0.0) || !x0.is_finite() || !y0.is_finite() {
            return Err(MapError::Geometry(format!("bad value map frame x0={x0} y0={y0} cell={cell}")));
        }
        if values.len() != width * height {
            return Err(MapError::Shape {
                expected: width * height,
                got: values.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
            return Err(MapError::ValueOutOfRange { index, value });
        }
        Ok(Self {
            x0,
            y0,
            cell,
            width,
            height,
            values,
        })
    }

    /// Disc of `inside` around `center`, `outside` elsewhere, covering `extent`
    /// metres in each direction from the origin.
    pub fn disc(center: Point, radius: f64, inside: f64, outside: f64, extent: f64, cell: f64) -> Result<Self, MapError> {
        let side = (2.0 * extent / cell).ceil() as usize;
        let x0 = -extent;
        let y0 = -extent;
        let mut values = Vec::with_capacity(side * side);
        for row in 0..side {
            for col in 0..side {
                let q = Point::new(x0 + (col as f64 + 0.5) * cell, y0 + (row as f64 + 0.5) * cell);
                values.push(if q.dist(center) <= radius { inside } else { outside });
            }
        }
        Self::new(x0, y0, cell, side, side, values)
    }

    pub fn value_at(&self, p: Point) -> f64 {
        let c = ((p.x - self.x0) / self.cell).floor();
        let r = ((p.y - self.y0) / self.cell).floor();
        if c < 0.0 || r < 0.0 || c >= self.width as f64 || r >= self.height as f64 {
            return 1.0;
        }
        self.values[r as usize * self.width + c as usize]
    }

    /// Sample at each cell centre of `geom`.
    pub fn layer_for(&self, geom: &GridGeom) -> Vec<f64> {
        let mut out = Vec::with_capacity(geom.len());
        for row in 0..geom.side {
            for col in 0..geom.side {
                out.push(self.value_at(geom.cell_center(col, row)));
            }
        }
        out
    }
}

/// Drone-centred `D x D x 2` observation. Channel 0 is perception, channel 1
/// obstacles; each channel is row-major with row 0 at the bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalObservation {
    size: usize,
    data: Vec<f64>,
}

impl LocalObservation {
    pub fn from_vec(size: usize, data: Vec<f64>) -> Result<Self, MapError> {
        if data.len() != 2 * size * size {
            return Err(MapError::Shape {
                expected: 2 * size * size,
                got: data.len(),
            });
        }
        Ok(Self { size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn perception(&self, col: usize, row: usize) -> f64 {
        self.data[row * self.size + col]
    }

    pub fn obstacle(&self, col: usize, row: usize) -> f64 {
        self.data[self.size * self.size + row * self.size + col]
    }
}

/// Per output index, the world cells overlapping it and their area fractions.
pub(crate) fn axis_weights(lo: f64, width: f64, d: usize, cell: f64) -> Vec<Vec<(i64, f64)>> {
    let step = width / d as f64;
    (0..d)
        .map(|a| {
            let a0 = lo + a as f64 * step;
            let a1 = a0 + step;
            let first = (a0 / cell).floor() as i64;
            let last = (a1 / cell).ceil() as i64 - 1;
            let mut w: Vec<(i64, f64)> = (first..=last)
                .filter_map(|i| {
                    let overlap = a1.min((i + 1) as f64 * cell) - a0.max(i as f64 * cell);
                    (overlap > 0.0).then_some((i, overlap))
                })
                .collect();
            let total: f64 = w.iter().map(|x| x.1).sum();
            for x in &mut w {
                x.1 /= total;
            }
            w
        })
        .collect()
}

/// Area-averaged `2 r_s x 2 r_s` window around `p`, resampled to `d x d`.
/// Cells outside the map read as perception 0, obstacle 1.
pub fn clip_local(info: &InfoMap, p: Point, d: usize, r_s: f64) -> LocalObservation {
    let geom = info.geom();
    let wx = axis_weights(p.x - r_s, 2.0 * r_s, d, geom.cell);
    let wy = axis_weights(p.y - r_s, 2.0 * r_s, d, geom.cell);
    let obstacle = info.obstacle.values();
    let mut data = vec![0.0; 2 * d * d];
    let (perc, obst) = data.split_at_mut(d * d);
    for (b, ys) in wy.iter().enumerate() {
        for (a, xs) in wx.iter().enumerate() {
            let mut m = 0.0;
            let mut o = 0.0;
            for &(iy, fy) in ys {
                for &(ix, fx) in xs {
                    let w = fx * fy;
                    match geom.local(ix, iy) {
                        Some((c, r)) => {
                            let idx = geom.index(c, r);
                            m += w * info.effective(idx);
                            o += w * obstacle[idx] as f64;
                        }
                        None => o += w,
                    }
                }
            }
            perc[b * d + a] = m.clamp(0.0, 1.0);
            obst[b * d + a] = o.clamp(0.0, 1.0);
        }
    }
    LocalObservation { size: d, data }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::obstacle::build_obstacle;
    use crate::model::Mode;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn info_with(cfg: &MissionConfig, fill: f64) -> InfoMap {
        let mut perception = PerceptionMap::new(cfg, Point::default());
        perception.fill(fill);
        let obstacle = build_obstacle(perception.geom(), &[], Point::default(), cfg);
        InfoMap::new(perception, obstacle).unwrap()
    }

    #[test]
    fn resampling_weights_sum_to_one() {
        // 100 m window over 5 m cells resampled to 21 outputs
        for lo in [-50.0, -47.3, 12.25, 0.0] {
            let w = axis_weights(lo, 100.0, 21, 5.0);
            assert_eq!(w.len(), 21);
            for cells in &w {
                let s: f64 = cells.iter().map(|x| x.1).sum();
                assert!((s - 1.0).abs() < 1e-12);
                assert!(cells.len() <= 3);
            }
            // total physical coverage: 20 (or 21 when misaligned) cells
            let touched: std::collections::BTreeSet<i64> = w.iter().flatten().map(|x| x.0).collect();
            assert!(touched.len() == 20 || touched.len() == 21);
        }
    }

    #[test]
    fn uniform_field_clips_uniform() {
        let cfg = MissionConfig::default();
        let info = info_with(&cfg, 0.37);
        let obs = clip_local(&info, Point::new(1.3, -2.2), 21, cfg.r_s);
        for r in 0..21 {
            for c in 0..21 {
                assert!((obs.perception(c, r) - 0.37).abs() < 1e-12);
                assert_eq!(obs.obstacle(c, r), 0.0);
            }
        }
    }

    #[test]
    fn corner_is_mostly_padding() {
        let cfg = MissionConfig::default();
        let info = info_with(&cfg, 0.0);
        let g = *info.geom();
        let corner = Point::new(g.min_ix as f64 * g.cell, g.min_iy as f64 * g.cell);
        let obs = clip_local(&info, corner, 21, cfg.r_s);
        let mass: f64 = (0..21).flat_map(|r| (0..21).map(move |c| (c, r))).map(|(c, r)| obs.obstacle(c, r)).sum();
        assert!(mass >= 0.75 * 441.0 - 1e-9, "{mass}");
    }

    #[test]
    fn whole_cell_translation_commutes_with_clipping() {
        let cfg = MissionConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = PerceptionMap::new(&cfg, Point::default());
        for v in a.values_mut() {
            *v = rng.random::<f64>();
        }
        let side = a.geom().side;
        let k = 3usize;
        // b holds a's content moved k cells to +x
        let mut b = PerceptionMap::new(&cfg, Point::default());
        for row in 0..side {
            for col in k..side {
                b.values_mut()[row * side + col] = a.get(col - k, row);
            }
        }
        let mk = |m: PerceptionMap| {
            let o = build_obstacle(m.geom(), &[], Point::default(), &cfg);
            InfoMap::new(m, o).unwrap()
        };
        let (ia, ib) = (mk(a), mk(b));
        let p = Point::new(-31.25, 17.5);
        let oa = clip_local(&ia, p, 21, cfg.r_s);
        let ob = clip_local(&ib, p + Point::new(k as f64 * cfg.cell, 0.0), 21, cfg.r_s);
        for r in 0..21 {
            for c in 0..21 {
                assert!((oa.perception(c, r) - ob.perception(c, r)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn observation_entries_in_unit_range() {
        let cfg = MissionConfig::default();
        let mut info = info_with(&cfg, 0.0);
        info.perception.stamp(Point::new(30.0, 30.0), Mode::Explore, &cfg);
        let o = build_obstacle(info.geom(), &[Point::new(35.0, 30.0)], Point::default(), &cfg);
        info.obstacle = o;
        for p in [Point::new(30.0, 30.0), Point::new(180.0, -190.0), Point::new(-260.0, 0.0)] {
            let obs = clip_local(&info, p, 21, cfg.r_s);
            assert!(obs.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn fusion_examples() {
        let cfg = MissionConfig::default();
        let info = info_with(&cfg, 0.0);
        let n = info.geom().len();

        let full = fuse_value_map(info.clone(), &vec![1.0; n], &cfg).unwrap();
        assert!((0..n).all(|i| full.effective(i) == info.effective(i)));

        let none = fuse_value_map(info.clone(), &vec![0.0; n], &cfg).unwrap();
        assert!((0..n).all(|i| none.effective(i) == cfg.m_a));
        // nothing left to gain anywhere
        let gain = none.perception.marginal_gain(Point::default(), &cfg, none.floor());
        assert_eq!(gain, 0.0);

        let crater = ValueMap::disc(Point::new(0.0, 0.0), 70.0, 1.0, 0.2, 300.0, 5.0).unwrap();
        let fused = fuse_value_map(info.clone(), &crater.layer_for(info.geom()), &cfg).unwrap();
        let g = fused.geom();
        let inside = g.index(50, 50);
        let outside = g.index(90, 50);
        assert_eq!(fused.effective(inside), 0.0);
        assert!((fused.effective(outside) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn fusion_rejects_bad_values() {
        let cfg = MissionConfig::default();
        let info = info_with(&cfg, 0.0);
        let n = info.geom().len();
        let mut v = vec![0.5; n];
        v[7] = 1.5;
        assert!(matches!(
            fuse_value_map(info.clone(), &v, &cfg),
            Err(MapError::ValueOutOfRange { index: 7, .. })
        ));
        v[7] = f64::NAN;
        assert!(fuse_value_map(info.clone(), &v, &cfg).is_err());
        assert!(matches!(fuse_value_map(info, &v[1..], &cfg), Err(MapError::Shape { .. })));
        assert!(ValueMap::new(0.0, 0.0, 5.0, 1, 1, vec![-0.1]).is_err());
    }

    #[test]
    fn value_map_outside_reads_full() {
        let vm = ValueMap::new(0.0, 0.0, 5.0, 2, 1, vec![0.25, 0.5]).unwrap();
        assert_eq!(vm.value_at(Point::new(2.0, 1.0)), 0.25);
        assert_eq!(vm.value_at(Point::new(7.0, 4.9)), 0.5);
        assert_eq!(vm.value_at(Point::new(10.0, 1.0)), 1.0);
        assert_eq!(vm.value_at(Point::new(-0.1, 1.0)), 1.0);
    }
}
