//! World-aligned square grids.
//!
//! Every grid in the crate shares one world lattice: cell `(ix, iy)` covers
//! `[ix*cell, (ix+1)*cell) x [iy*cell, (iy+1)*cell)`. A rover-centred map is a
//! `side x side` window of that lattice, so translating it never resamples.

use crate::model::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeom {
    pub side: usize,
    pub cell: f64,
    /// World index of column 0.
    pub min_ix: i64,
    /// World index of row 0.
    pub min_iy: i64,
}

impl GridGeom {
    /// Window of `side` cells whose centre is the lattice point nearest `origin`.
    pub fn centered(origin: Point, side: usize, cell: f64) -> Self {
        let half = (side / 2) as i64;
        Self {
            side,
            cell,
            min_ix: (origin.x / cell).round() as i64 - half,
            min_iy: (origin.y / cell).round() as i64 - half,
        }
    }

    pub fn len(&self) -> usize {
        self.side * self.side
    }

    pub fn is_empty(&self) -> bool {
        self.side == 0
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.side + col
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point {
        Point::new(
            ((self.min_ix + col as i64) as f64 + 0.5) * self.cell,
            ((self.min_iy + row as i64) as f64 + 0.5) * self.cell,
        )
    }

    pub fn world_index(&self, col: usize, row: usize) -> (i64, i64) {
        (self.min_ix + col as i64, self.min_iy + row as i64)
    }

    /// Local (col, row) of a world cell, if it falls inside the window.
    pub fn local(&self, ix: i64, iy: i64) -> Option<(usize, usize)> {
        let c = ix - self.min_ix;
        let r = iy - self.min_iy;
        let side = self.side as i64;
        (c >= 0 && r >= 0 && c < side && r < side).then_some((c as usize, r as usize))
    }

    /// Inclusive (col, row) bounds of cells whose centres may lie within
    /// `radius` of `p`, clipped to the window. `None` if disjoint.
    pub fn disc_bounds(&self, p: Point, radius: f64) -> Option<(usize, usize, usize, usize)> {
        let side = self.side as i64;
        let c0 = ((p.x - radius) / self.cell - 0.5).floor() as i64 - self.min_ix;
        let c1 = ((p.x + radius) / self.cell - 0.5).ceil() as i64 - self.min_ix;
        let r0 = ((p.y - radius) / self.cell - 0.5).floor() as i64 - self.min_iy;
        let r1 = ((p.y + radius) / self.cell - 0.5).ceil() as i64 - self.min_iy;
        let (c0, c1, r0, r1) = (c0.max(0), c1.min(side - 1), r0.max(0), r1.min(side - 1));
        (c0 <= c1 && r0 <= r1).then_some((c0 as usize, c1 as usize, r0 as usize, r1 as usize))
    }
}
