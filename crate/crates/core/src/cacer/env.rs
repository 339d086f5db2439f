//! Pure coverage environment used for training: every drone explores for one
//! endurance period while the rover drives a random straight line.

use rand::Rng;

use crate::maps::{build_obstacle, clip_local, InfoMap, LocalObservation, PerceptionMap};
use crate::model::{MissionConfig, Mode, Point, RoverPath};
use crate::sim::rewards::{baseline_map, combine, coverage_reward, exploration_reward, penalty, RewardTerms};

#[derive(Debug, Clone)]
pub struct CoverageEnv {
    cfg: MissionConfig,
    sum_m0: f64,
    path: RoverPath,
    t: usize,
    rover: Point,
    drones: Vec<Point>,
    info: InfoMap,
}

#[derive(Debug, Clone)]
pub struct EnvStep {
    pub rewards: Vec<RewardTerms>,
    pub collision: bool,
    /// Some drone ended the step beyond comms range.
    pub disconnected: bool,
}

impl CoverageEnv {
    /// Random episode: fleet size in `train_n_min..=n`, rover heading, and
    /// drone starts spread over the inner half of the comms disc.
    pub fn reset<R: Rng + ?Sized>(cfg: &MissionConfig, rng: &mut R) -> Self {
        let n = rng.random_range(cfg.train_n_min..=cfg.n);
        let heading = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let path = RoverPath::straight(Point::default(), heading, cfg.v_r * cfg.dt * (cfg.t_a as f64 + 1.0) + 1.0);
        let mut drones: Vec<Point> = Vec::with_capacity(n);
        let spread = cfg.r_c / 2.0;
        for _ in 0..n {
            let mut p = Point::default();
            for _ in 0..1000 {
                let r = spread * rng.random::<f64>().sqrt();
                p = Point::from_angle(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)) * r;
                if drones.iter().all(|q| q.dist(p) >= 2.0 * cfg.r_o) {
                    break;
                }
            }
            drones.push(p);
        }
        let mut perception = PerceptionMap::new(cfg, Point::default());
        for &p in &drones {
            perception.stamp(p, Mode::Explore, cfg);
        }
        let obstacle = build_obstacle(perception.geom(), &drones, Point::default(), cfg);
        Self {
            cfg: cfg.clone(),
            sum_m0: baseline_map(cfg),
            path,
            t: 0,
            rover: Point::default(),
            drones,
            info: InfoMap::new(perception, obstacle).expect("shared geometry"),
        }
    }

    pub fn n(&self) -> usize {
        self.drones.len()
    }

    pub fn drones(&self) -> &[Point] {
        &self.drones
    }

    pub fn rover(&self) -> Point {
        self.rover
    }

    pub fn observe(&self, i: usize) -> LocalObservation {
        clip_local(&self.info, self.drones[i], self.cfg.obs_size, self.cfg.r_s)
    }

    pub fn step(&mut self, headings: &[f64]) -> EnvStep {
        let cfg = &self.cfg;
        let step = cfg.step_len();
        for (p, &h) in self.drones.iter_mut().zip(headings) {
            *p = *p + Point::from_angle(std::f64::consts::PI * h) * step;
        }
        self.t += 1;
        let rover = crate::model::rover_position(&self.path, self.t, cfg);
        self.info.perception.shift(rover - self.rover);
        self.rover = rover;

        self.info.perception.decay(cfg.decay());
        let r_e: Vec<f64> = self
            .drones
            .iter()
            .map(|&p| exploration_reward(&self.info.perception, p, cfg, None))
            .collect();
        for &p in &self.drones {
            self.info.perception.stamp(p, Mode::Explore, cfg);
        }
        let r_c = coverage_reward(self.info.perception.sum(), self.drones.len(), self.sum_m0);
        self.info.obstacle = build_obstacle(self.info.perception.geom(), &self.drones, rover, cfg);

        let airborne = vec![true; self.drones.len()];
        let mut collision = false;
        let rewards = (0..self.drones.len())
            .map(|i| {
                let r_p = penalty(i, &self.drones, &airborne, rover, cfg);
                collision |= r_p == crate::sim::rewards::COLLISION_PENALTY;
                combine(r_c, r_e[i], r_p, cfg)
            })
            .collect();
        let disconnected = self.drones.iter().any(|p| p.dist(rover) > cfg.r_c);
        EnvStep {
            rewards,
            collision,
            disconnected,
        }
    }
}
