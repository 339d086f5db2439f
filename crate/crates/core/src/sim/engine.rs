//! Closed-loop mission: sensing, mode control, slot scheduling and flight.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::metrics::{Metrics, MetricsReport, WorldGrid};
use super::rewards::{baseline_map, combine, coverage_reward, exploration_reward, penalty, COLLISION_PENALTY};
use super::scenario::Scenario;
use crate::maps::{build_obstacle, clip_local, fuse_value_map, GridGeom, InfoMap, MapError, PerceptionMap};
use crate::model::{
    lattice_point, rover_position, slot_positions, step_kinematics, Action, DroneState, MissionConfig, Mode, PathError, Point, SlotSet,
};
use crate::modes::{select_action, update_mode, ModeError, ModeTransitionEvent};
use crate::policy::Policy;
use crate::scheduler::{audit_feasibility, build_instance_with, slack, solve, Assignment, AuditFailure, ScheduleError};

/// Steps of slack kept between an exploring drone and its slot deadline.
/// Matches the margin in the return trigger.
pub const RETURN_MARGIN: f64 = 2.0;

#[derive(Debug, Clone, Default)]
pub struct MissionOptions {
    /// Keep a perception/obstacle snapshot every this many steps.
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogRow {
    pub step: usize,
    pub drone: usize,
    pub x: f64,
    pub y: f64,
    pub mode: Mode,
    pub t_i: u32,
    pub slot: Option<u32>,
    pub r_c: f64,
    pub r_e: f64,
    pub r_p: f64,
    pub reward: f64,
    pub rover_x: f64,
    pub rover_y: f64,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub geom: GridGeom,
    pub perception: Vec<f64>,
    pub obstacle: Vec<u8>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MissionStats {
    /// Drone-steps spent inside another airborne drone's safety radius.
    pub collisions: usize,
    /// Drone-steps an exploring drone spent beyond comms range.
    pub connectivity_violations: usize,
    /// Drone-steps with consumed endurance above the battery.
    pub battery_deaths: usize,
    pub ring_violations: usize,
    pub transitions: usize,
    /// Steps whose assignment needed the zero-margin fallback.
    pub relaxed_solves: usize,
    /// Drones routed to the nearest free slot after an infeasible solve.
    pub fallback_routes: usize,
    pub max_t_i: u32,
}

#[derive(Debug, Clone)]
pub struct MissionOutput {
    pub metrics: MetricsReport,
    pub stats: MissionStats,
    pub log: Vec<LogRow>,
    pub events: Vec<ModeTransitionEvent>,
    pub snapshots: Vec<Snapshot>,
    /// Per-cell maximum perception over the mission, world frame.
    pub running_max: WorldGrid,
}

#[derive(Debug, Error)]
pub enum MissionError {
    #[error("scenario path: {0}")]
    Path(#[from] PathError),
    #[error("value map: {0}")]
    Map(#[from] MapError),
    #[error("step {step}: {source}")]
    Audit { step: usize, source: AuditFailure },
    #[error("step {step}: scheduler {source}")]
    Schedule { step: usize, source: ScheduleError },
    #[error("step {step}, drone {drone}: {source}")]
    Mode { step: usize, drone: usize, source: ModeError },
}

/// Greedy nearest-free-slot routing, used only when the assignment is infeasible.
fn nearest_free(fleet: &[DroneState], slots: &SlotSet) -> Vec<(usize, crate::model::SlotId)> {
    let mut taken: Vec<bool> = slots.occupancy.iter().map(Option::is_some).collect();
    let mut out = Vec::new();
    for (i, d) in fleet.iter().enumerate().filter(|(_, d)| d.mode == Mode::Explore) {
        let best = (0..slots.len())
            .filter(|&k| !taken[k])
            .min_by(|&a, &b| d.p.dist(slots.positions[a]).total_cmp(&d.p.dist(slots.positions[b])));
        if let Some(k) = best {
            taken[k] = true;
            out.push((i, slots.ids[k]));
        }
    }
    out
}

pub fn run_mission(policy: &dyn Policy, scenario: &Scenario, cfg: &MissionConfig, opts: &MissionOptions) -> Result<MissionOutput, MissionError> {
    let clock = Instant::now();
    let path = scenario.path()?;
    let value = scenario.load_value_map(cfg)?;
    let n = scenario.fleet_size(cfg);
    let steps = scenario.steps;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(n as u64);

    let sum_m0 = baseline_map(cfg);
    let track: Vec<Point> = (0..=steps).map(|t| rover_position(&path, t, cfg)).collect();
    let mut metrics = Metrics::new(cfg, &track, n);
    let mut rover = track[0];
    let perception = PerceptionMap::new(cfg, rover);
    let obstacle = build_obstacle(perception.geom(), &[], rover, cfg);
    let mut info = InfoMap::new(perception, obstacle)?;
    let mut fused_geom: Option<GridGeom> = None;

    let mut fleet = vec![DroneState::docked(rover); n];
    let interval = cfg.departure_interval();
    let mut first_flight = vec![false; n];
    let mut stats = MissionStats::default();
    let mut log = Vec::with_capacity(steps * n);
    let mut events = Vec::new();
    let mut snapshots = Vec::new();

    for t in 1..=steps {
        // rover and map frame
        let next = track[t];
        info.perception.shift(next - rover);
        rover = next;
        if let Some(v) = &value {
            if fused_geom != Some(*info.geom()) {
                let layer = v.layer_for(info.geom());
                info = fuse_value_map(info, &layer, cfg)?;
                fused_geom = Some(*info.geom());
            }
        }
        for d in fleet.iter_mut().filter(|d| d.is_docked()) {
            d.p = rover;
        }

        // sensing and rewards
        info.perception.decay(cfg.decay());
        let airborne: Vec<bool> = fleet.iter().map(|d| d.mode.is_airborne()).collect();
        let r_e: Vec<f64> = fleet
            .iter()
            .zip(&airborne)
            .map(|(d, &air)| if air { exploration_reward(&info.perception, d.p, cfg, info.floor()) } else { 0.0 })
            .collect();
        let sensing: Vec<(usize, Point)> = fleet.iter().enumerate().filter(|(_, d)| d.mode.is_airborne()).map(|(i, d)| (i, d.p)).collect();
        for &(_, p) in &sensing {
            info.perception.stamp(p, Mode::Explore, cfg);
        }
        let r_c = coverage_reward(info.effective_sum(), n, sum_m0);
        metrics.record(&info.perception, rover, &sensing);
        let airborne_pos: Vec<Point> = sensing.iter().map(|s| s.1).collect();
        info.obstacle = build_obstacle(info.geom(), &airborne_pos, rover, cfg);

        let positions: Vec<Point> = fleet.iter().map(|d| d.p).collect();
        for (i, d) in fleet.iter().enumerate() {
            let r_p = penalty(i, &positions, &airborne, rover, cfg);
            if r_p == COLLISION_PENALTY {
                stats.collisions += 1;
            }
            if d.mode == Mode::Explore && d.p.dist(rover) > cfg.r_c {
                stats.connectivity_violations += 1;
            }
            let terms = combine(r_c, r_e[i], r_p, cfg);
            log.push(LogRow {
                step: t,
                drone: i,
                x: d.p.x,
                y: d.p.y,
                mode: d.mode,
                t_i: d.t_i,
                slot: d.slot.map(|s| s.0),
                r_c,
                r_e: r_e[i],
                r_p,
                reward: terms.total,
                rover_x: rover.x,
                rover_y: rover.y,
            });
        }

        // mode transitions
        let mut slots = slot_positions(&path, t, cfg);
        let prev = fleet.clone();
        let mut transitioned = vec![false; n];
        for i in 0..n {
            let s = fleet[i];
            let slot_pos = s.slot.map(|id| lattice_point(&path, id, cfg));
            let next = if s.is_docked() {
                if t - 1 < i * interval {
                    continue;
                }
                first_flight[i] = true;
                DroneState {
                    mode: Mode::Explore,
                    t_i: 0,
                    ..s
                }
            } else {
                update_mode(&s, slot_pos, rover, cfg).map_err(|source| MissionError::Mode { step: t, drone: i, source })?
            };
            if let Some(ev) = ModeTransitionEvent::between(t, i, &s, &next, slot_pos, rover, cfg) {
                if ev.to != ev.from.successor() {
                    stats.ring_violations += 1;
                }
                events.push(ev);
                transitioned[i] = true;
            }
            fleet[i] = next;
        }
        for (i, d) in fleet.iter().enumerate() {
            if matches!(d.mode, Mode::Return | Mode::Charge) {
                if let Some(k) = d.slot.and_then(|id| slots.index_of(id)) {
                    slots.occupancy[k] = Some(i);
                }
            }
        }

        // slot assignment for exploring drones
        let strict = vec![RETURN_MARGIN; n];
        let assigned: Vec<(usize, crate::model::SlotId)> = match solve(&build_instance_with(&fleet, &slots, cfg, &strict)) {
            Ok(Assignment { pairs, .. }) => pairs,
            Err(_) => {
                stats.relaxed_solves += 1;
                let relaxed: Vec<f64> = transitioned.iter().map(|&tr| if tr { RETURN_MARGIN } else { 0.0 }).collect();
                match solve(&build_instance_with(&fleet, &slots, cfg, &relaxed)) {
                    Ok(a) => a.pairs,
                    Err(e) if cfg.infeasible_fallback => {
                        log::warn!("step {t}: {e}; routing to nearest free slots");
                        let routes = nearest_free(&fleet, &slots);
                        stats.fallback_routes += routes.len();
                        routes
                    }
                    Err(source) => return Err(MissionError::Schedule { step: t, source }),
                }
            }
        };
        for (i, id) in assigned {
            fleet[i].slot = Some(id);
        }
        // head home before the assigned slot drops below the margin
        for i in 0..n {
            let s = fleet[i];
            if s.mode != Mode::Explore || transitioned[i] {
                continue;
            }
            let Some(k) = s.slot.and_then(|id| slots.index_of(id)) else {
                continue;
            };
            if slack(&s, &slots, k, cfg) < RETURN_MARGIN {
                fleet[i].mode = Mode::Return;
                slots.occupancy[k] = Some(i);
                transitioned[i] = true;
                if let Some(ev) = ModeTransitionEvent::between(t, i, &s, &fleet[i], Some(slots.positions[k]), rover, cfg) {
                    events.push(ev);
                }
            }
        }
        if !cfg.infeasible_fallback {
            audit_feasibility(&prev, &fleet, &slots, cfg).map_err(|source| MissionError::Audit { step: t, source })?;
        }

        // actions and flight
        for i in 0..n {
            let s = fleet[i];
            let slot_pos = s.slot.map(|id| lattice_point(&path, id, cfg));
            let action = if s.mode == Mode::Explore && first_flight[i] {
                first_flight[i] = false;
                Action::Heading(rng.random_range(-1.0..1.0))
            } else {
                let obs = (s.mode == Mode::Explore).then(|| clip_local(&info, s.p, cfg.obs_size, cfg.r_s));
                select_action(&s, obs.as_ref(), policy, slot_pos).map_err(|source| MissionError::Mode { step: t, drone: i, source })?
            };
            if let Action::Heading(h) = action {
                fleet[i] = match slot_pos {
                    // final approach: land instead of overshooting
                    Some(q) if s.mode == Mode::Return && s.p.dist(q) <= cfg.step_len() => DroneState {
                        p: q,
                        psi: h,
                        t_i: s.t_i + 1,
                        ..s
                    },
                    _ => step_kinematics(&s, h, cfg),
                };
            }
            if fleet[i].t_i > cfg.t_a {
                stats.battery_deaths += 1;
            }
            stats.max_t_i = stats.max_t_i.max(fleet[i].t_i);
        }

        if opts.snapshot_every.is_some_and(|k| k > 0 && t % k == 0) {
            snapshots.push(Snapshot {
                step: t,
                geom: *info.geom(),
                perception: info.perception.values().to_vec(),
                obstacle: info.obstacle.values().to_vec(),
            });
        }
    }

    stats.transitions = events.len();
    let mut report = metrics.report();
    report.wall_clock_secs = clock.elapsed().as_secs_f64();
    Ok(MissionOutput {
        metrics: report,
        stats,
        log,
        events,
        snapshots,
        running_max: metrics.running_max().clone(),
    })
}
