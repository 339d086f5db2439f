//! Obstacle map: cells within the safety radius of any drone, or beyond
//! communication range of the rover.

use crate::model::{MissionConfig, Point};

use super::grid::GridGeom;

#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleMap {
    geom: GridGeom,
    values: Vec<u8>,
}

impl ObstacleMap {
    pub fn geom(&self) -> &GridGeom {
        &self.geom
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.values[self.geom.index(col, row)]
    }
}

pub fn build_obstacle(geom: &GridGeom, drones: &[Point], rover: Point, cfg: &MissionConfig) -> ObstacleMap {
    let mut values = vec![0u8; geom.len()];
    for row in 0..geom.side {
        for col in 0..geom.side {
            if geom.cell_center(col, row).dist(rover) > cfg.r_c {
                values[row * geom.side + col] = 1;
            }
        }
    }
    for &p in drones {
        let Some((c0, c1, r0, r1)) = geom.disc_bounds(p, cfg.r_o) else {
            continue;
        };
        for row in r0..=r1 {
            for col in c0..=c1 {
                if geom.cell_center(col, row).dist(p) < cfg.r_o {
                    values[row * geom.side + col] = 1;
                }
            }
        }
    }
    ObstacleMap { geom: *geom, values }
}
