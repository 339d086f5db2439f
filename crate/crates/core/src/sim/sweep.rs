//! Fleet-size sweeps over paired seeds.

use rayon::prelude::*;
use serde::Serialize;

use super::engine::{run_mission, MissionError, MissionOptions};
use super::scenario::Scenario;
use crate::model::MissionConfig;
use crate::policy::Policy;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub seed: u64,
    pub gamma_cum: f64,
    pub gamma_avg: f64,
    pub effective_coverage: f64,
    pub collisions: usize,
    pub battery_deaths: usize,
    pub relaxed_solves: usize,
}

fn pool() -> rayon::ThreadPool {
    let threads = std::env::var("SC2_THREADS").ok().and_then(|v| v.parse().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
}

/// Run `scenario` once per `(n, seed)`. Every fleet size sees the same seeds,
/// and rows come back ordered by `n`, then seed, whatever the thread count.
pub fn sweep_fleet(policy: &dyn Policy, scenario: &Scenario, cfg: &MissionConfig, ns: &[usize], seeds: &[u64]) -> Result<Vec<SweepRow>, MissionError> {
    let jobs: Vec<(usize, u64)> = ns.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    pool().install(|| {
        jobs.par_iter()
            .map(|&(n, seed)| {
                let sc = Scenario { n: Some(n), ..scenario.clone() };
                let run_cfg = MissionConfig { seed, ..cfg.clone() };
                let out = run_mission(policy, &sc, &run_cfg, &MissionOptions::default())?;
                Ok(SweepRow {
                    n,
                    seed,
                    gamma_cum: out.metrics.gamma_cum,
                    gamma_avg: out.metrics.gamma_avg,
                    effective_coverage: out.metrics.effective_coverage,
                    collisions: out.stats.collisions,
                    battery_deaths: out.stats.battery_deaths,
                    relaxed_solves: out.stats.relaxed_solves,
                })
            })
            .collect()
    })
}

/// Median of a non-empty slice.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
