//! Rectangular Hungarian algorithm with forbidden edges.
//!
//! Costs are compared lexicographically as (distance, tie-break) pairs. The
//! tie-break encodes the assignment vector in base `cols`, so among matchings
//! of equal distance the one that is lexicographically smallest by
//! (drone, slot) wins.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::instance::AllocationInstance;
use super::{InfeasibleReason, ScheduleError};
use crate::model::SlotId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// `(drone, slot)` per instance row, in row order.
    pub pairs: Vec<(usize, SlotId)>,
    /// Chosen column per instance row.
    pub columns: Vec<usize>,
    /// Total distance, summed in row order.
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cost {
    primary: f64,
    secondary: i128,
}

impl Cost {
    const ZERO: Cost = Cost { primary: 0.0, secondary: 0 };
    const INF: Cost = Cost {
        primary: f64::INFINITY,
        secondary: 0,
    };

    fn is_inf(self) -> bool {
        self.primary == f64::INFINITY
    }

    fn add(self, o: Cost) -> Cost {
        Cost {
            primary: self.primary + o.primary,
            secondary: self.secondary + o.secondary,
        }
    }

    fn sub(self, o: Cost) -> Cost {
        if self.is_inf() {
            return Cost::INF;
        }
        Cost {
            primary: self.primary - o.primary,
            secondary: self.secondary - o.secondary,
        }
    }

    fn less(self, o: Cost) -> bool {
        match self.primary.partial_cmp(&o.primary) {
            Some(Ordering::Less) => true,
            Some(Ordering::Equal) => !self.is_inf() && self.secondary < o.secondary,
            _ => false,
        }
    }
}

fn tie_weights(n: usize, m: usize) -> Vec<i128> {
    let base = m.max(1) as i128;
    // potentials stay within a few multiples of the largest encoded value
    let fits = base.checked_pow(n as u32).and_then(|x| x.checked_mul(8 * n as i128)).is_some();
    if !fits {
        // ties then fall back to search order
        return vec![0; n];
    }
    (0..n).map(|r| base.pow((n - 1 - r) as u32)).collect()
}

/// Minimum-cost matching of every row to a distinct allowed column.
pub fn solve(inst: &AllocationInstance) -> Result<Assignment, ScheduleError> {
    let n = inst.rows();
    let m = inst.cols();
    if n == 0 {
        return Ok(Assignment {
            pairs: Vec::new(),
            columns: Vec::new(),
            z: 0.0,
        });
    }
    if let Some(r) = inst.cost.iter().position(|row| row.iter().all(Option::is_none)) {
        return Err(ScheduleError::Infeasible {
            reason: InfeasibleReason::ReachabilityDeadline,
            detail: format!("drone {} has no slot it can reach in time", inst.drones[r]),
        });
    }
    if n > m {
        return Err(ScheduleError::Infeasible {
            reason: InfeasibleReason::SlotCapacity,
            detail: format!("{n} drones for {m} free slots"),
        });
    }

    let w = tie_weights(n, m);
    let a = |i: usize, j: usize| -> Cost {
        match inst.cost[i - 1][j - 1] {
            Some(d) => Cost {
                primary: d,
                secondary: (j - 1) as i128 * w[i - 1],
            },
            None => Cost::INF,
        }
    };

    // 1-based rows and columns; p[j] is the row matched to column j, 0 if none
    let mut u = vec![Cost::ZERO; n + 1];
    let mut v = vec![Cost::ZERO; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![Cost::INF; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = Cost::INF;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = a(i0, j).sub(u[i0]).sub(v[j]);
                if cur.less(minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j].less(delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if delta.is_inf() {
                return Err(ScheduleError::Infeasible {
                    reason: InfeasibleReason::EveryDroneAssigned,
                    detail: format!(
                        "drones {:?} compete for fewer reachable slots than there are drones",
                        (0..=m).filter(|&j| used[j]).map(|j| inst.drones[p[j] - 1]).collect::<Vec<_>>()
                    ),
                });
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] = u[p[j]].add(delta);
                    v[j] = v[j].sub(delta);
                } else {
                    minv[j] = minv[j].sub(delta);
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut columns = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            columns[p[j] - 1] = j - 1;
        }
    }
    let mut z = 0.0;
    for (r, &c) in columns.iter().enumerate() {
        z += inst.cost[r][c].expect("matched edge is allowed");
    }
    Ok(Assignment {
        pairs: columns.iter().enumerate().map(|(r, &c)| (inst.drones[r], inst.slots[c])).collect(),
        columns,
        z,
    })
}

/// Exhaustive search over injective row-to-column maps, for small instances.
/// Returns the optimal cost and the lexicographically smallest optimal
/// column vector, or `None` if no full matching exists.
pub fn brute_force(inst: &AllocationInstance) -> Option<(f64, Vec<usize>)> {
    fn rec(inst: &AllocationInstance, r: usize, used: &mut [bool], cols: &mut Vec<usize>, best: &mut Option<(f64, Vec<usize>)>) {
        if r == inst.rows() {
            let mut z = 0.0;
            for (i, &c) in cols.iter().enumerate() {
                z += inst.cost[i][c].unwrap();
            }
            // columns are explored in increasing order, so the first optimum
            // found is the lexicographically smallest
            if best.as_ref().map_or(true, |(b, _)| z < *b) {
                *best = Some((z, cols.clone()));
            }
            return;
        }
        for c in 0..inst.cols() {
            if !used[c] && inst.cost[r][c].is_some() {
                used[c] = true;
                cols.push(c);
                rec(inst, r + 1, used, cols, best);
                cols.pop();
                used[c] = false;
            }
        }
    }
    let mut best = None;
    rec(inst, 0, &mut vec![false; inst.cols()], &mut Vec::new(), &mut best);
    best
}
