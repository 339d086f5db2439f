use serde::{Deserialize, Serialize};

use crate::model::{DroneState, MissionConfig, Mode, SlotId, SlotSet};

use super::ScheduleError;

/// Drone-to-slot assignment problem for one step. `cost[r][c]` is the
/// straight-line distance from drone `drones[r]` to slot `slots[c]`, or
/// `None` where the reachability deadline forbids the edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationInstance {
    #[serde(default)]
    pub drones: Vec<usize>,
    #[serde(default)]
    pub slots: Vec<SlotId>,
    pub cost: Vec<Vec<Option<f64>>>,
}

impl AllocationInstance {
    /// Instance over an explicit cost matrix, with drones and slots numbered
    /// from zero.
    pub fn from_costs(cost: Vec<Vec<Option<f64>>>) -> Self {
        let m = cost.first().map_or(0, Vec::len);
        Self {
            drones: (0..cost.len()).collect(),
            slots: (0..m as u32).map(SlotId).collect(),
            cost,
        }
    }

    pub fn rows(&self) -> usize {
        self.cost.len()
    }

    pub fn cols(&self) -> usize {
        self.cost.first().map_or(self.slots.len(), Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.cost.is_empty()
    }

    /// Fill in default labels and check the matrix is rectangular with
    /// finite non-negative costs.
    pub fn normalized(mut self) -> Result<Self, ScheduleError> {
        let m = self.cols();
        if self.drones.is_empty() {
            self.drones = (0..self.cost.len()).collect();
        }
        if self.slots.is_empty() {
            self.slots = (0..m as u32).map(SlotId).collect();
        }
        if self.drones.len() != self.cost.len() {
            return Err(ScheduleError::Invalid(format!(
                "{} drone labels for {} cost rows",
                self.drones.len(),
                self.cost.len()
            )));
        }
        if self.slots.len() != m {
            return Err(ScheduleError::Invalid(format!("{} slot labels for {m} cost columns", self.slots.len())));
        }
        for (r, row) in self.cost.iter().enumerate() {
            if row.len() != m {
                return Err(ScheduleError::Invalid(format!("row {r} has {} columns, expected {m}", row.len())));
            }
            if let Some(c) = row.iter().flatten().find(|c| !c.is_finite() || **c < 0.0) {
                return Err(ScheduleError::Invalid(format!("row {r} has cost {c}")));
            }
        }
        Ok(self)
    }
}

/// Steps needed to fly `d` metres.
pub fn travel_steps(d: f64, cfg: &MissionConfig) -> f64 {
    d / cfg.step_len()
}

/// Steps a drone can still spend before reaching slot `k`: the earlier of the
/// rover's arrival and the drone's remaining endurance.
pub fn deadline(slots: &SlotSet, k: usize, t_i: u32, cfg: &MissionConfig) -> f64 {
    slots.rover_eta[k].min(cfg.t_a as f64 - t_i as f64)
}

/// Deadline minus travel time for drone `s` flying to slot `k`.
pub fn slack(s: &DroneState, slots: &SlotSet, k: usize, cfg: &MissionConfig) -> f64 {
    deadline(slots, k, s.t_i, cfg) - travel_steps(s.p.dist(slots.positions[k]), cfg)
}

/// Instance over exploring drones and free slots. An edge is allowed when the
/// drone reaches the slot at least `margins[i]` steps before its deadline;
/// a zero margin is exactly the reachability constraint.
pub fn build_instance_with(fleet: &[DroneState], slots: &SlotSet, cfg: &MissionConfig, margins: &[f64]) -> AllocationInstance {
    let drones: Vec<usize> = (0..fleet.len()).filter(|&i| fleet[i].mode == Mode::Explore).collect();
    let free: Vec<usize> = (0..slots.len()).filter(|&k| slots.is_free(k)).collect();
    let cost = drones
        .iter()
        .map(|&i| {
            let s = &fleet[i];
            free.iter()
                .map(|&k| {
                    let d = s.p.dist(slots.positions[k]);
                    (travel_steps(d, cfg) <= deadline(slots, k, s.t_i, cfg) - margins[i]).then_some(d)
                })
                .collect()
        })
        .collect();
    AllocationInstance {
        drones,
        slots: free.iter().map(|&k| slots.ids[k]).collect(),
        cost,
    }
}

pub fn build_instance(fleet: &[DroneState], slots: &SlotSet, cfg: &MissionConfig) -> AllocationInstance {
    build_instance_with(fleet, slots, cfg, &vec![0.0; fleet.len()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{slot_positions, Point, RoverPath};

    fn setup() -> (MissionConfig, SlotSet) {
        let cfg = MissionConfig::default();
        let path = RoverPath::straight(Point::new(0.0, 0.0), 0.0, 1000.0);
        (cfg.clone(), slot_positions(&path, 0, &cfg))
    }

    #[test]
    fn charging_fleet_gives_empty_instance() {
        let (cfg, slots) = setup();
        let fleet = vec![DroneState::new(Point::new(0.0, 0.0), Mode::Charge); 3];
        let inst = build_instance(&fleet, &slots, &cfg);
        assert!(inst.is_empty());
        assert_eq!(inst.slots.len(), 40);
    }

    #[test]
    fn far_drone_misses_first_slot() {
        let (cfg, slots) = setup();
        // 100 m from slot 1 at (5, 0): 20 steps of travel against a 10 step deadline
        let fleet = [DroneState::new(Point::new(5.0, 100.0), Mode::Explore)];
        let inst = build_instance(&fleet, &slots, &cfg);
        assert_eq!(inst.cost[0][0], None);
        // slot 3 at (15, 0) has a 30 step deadline
        assert!(inst.cost[0][2].is_some());
    }

    #[test]
    fn endurance_bounds_deadline() {
        let (cfg, slots) = setup();
        let mut s = DroneState::new(Point::new(10.0, 10.0), Mode::Explore);
        s.t_i = cfg.t_a - 4;
        let inst = build_instance(&[s], &slots, &cfg);
        // slot 2 at (10, 0): 2 steps of travel, deadline min(20, 4)
        assert_eq!(inst.cost[0][1], Some(10.0));
        assert_eq!(deadline(&slots, 1, s.t_i, &cfg), 4.0);
        // a 3 step margin forbids it
        let inst = build_instance_with(&[s], &slots, &cfg, &[3.0]);
        assert_eq!(inst.cost[0][1], None);
    }

    #[test]
    fn occupied_slots_excluded() {
        let (cfg, mut slots) = setup();
        slots.occupancy[0] = Some(1);
        slots.occupancy[5] = Some(2);
        let fleet = [DroneState::new(Point::new(0.0, 0.0), Mode::Explore)];
        let inst = build_instance(&fleet, &slots, &cfg);
        assert_eq!(inst.slots.len(), 38);
        assert!(!inst.slots.contains(&slots.ids[0]));
        assert!(!inst.slots.contains(&slots.ids[5]));
    }

    #[test]
    fn json_defaults_and_validation() {
        let inst: AllocationInstance = serde_json::from_str(r#"{"cost": [[10, 20], [15, null]]}"#).unwrap();
        let inst = inst.normalized().unwrap();
        assert_eq!(inst.drones, vec![0, 1]);
        assert_eq!(inst.slots, vec![SlotId(0), SlotId(1)]);
        assert_eq!(inst.cost[1][1], None);
        let ragged = AllocationInstance::from_costs(vec![vec![Some(1.0)], vec![Some(1.0), Some(2.0)]]);
        assert!(ragged.normalized().is_err());
        let negative = AllocationInstance::from_costs(vec![vec![Some(-1.0)]]);
        assert!(negative.normalized().is_err());
    }
}
