//! Centralised training loop: all drones share one policy and one buffer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::agent::{ActorCritic, UpdateStats};
use super::env::CoverageEnv;
use super::replay::{store, Experience, ReplayBuffer};
use crate::model::MissionConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub episode: usize,
    /// Mean unscaled reward per drone per step.
    pub mean_reward: f64,
    pub sigma: f64,
    pub steps: usize,
    pub updates: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub agent: ActorCritic,
    pub curve: Vec<CurvePoint>,
    /// Episodes completed in total, including any before a resume.
    pub episode: usize,
}

/// Noise scale for `episode`, linear from `sigma_start` to `sigma_end`.
pub fn sigma_at(cfg: &MissionConfig, episode: usize) -> f64 {
    if cfg.episodes <= 1 {
        return cfg.sigma_start;
    }
    let f = (episode as f64 / (cfg.episodes - 1) as f64).min(1.0);
    cfg.sigma_start + (cfg.sigma_end - cfg.sigma_start) * f
}

/// Fresh parameters for `cfg.seed`.
pub fn initial_agent(cfg: &MissionConfig) -> ActorCritic {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::MAX);
    ActorCritic::new(cfg, &mut rng)
}

fn episode_rng(seed: u64, episode: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode as u64);
    rng
}

/// Train until `cfg.episodes` episodes have run in total, starting from
/// `start` (agent and completed episode count) or from fresh parameters.
/// An episode ends after `t_a` steps, or early on a collision or when a
/// drone leaves comms range; that transition is stored as terminal.
pub fn train(cfg: &MissionConfig, start: Option<(ActorCritic, usize)>) -> TrainOutcome {
    let (mut agent, first) = start.unwrap_or_else(|| (initial_agent(cfg), 0));
    let mut buffer = ReplayBuffer::new(cfg.replay_capacity);
    let mut curve = Vec::new();
    for episode in first..cfg.episodes {
        let mut rng = episode_rng(cfg.seed, episode);
        agent.sigma = sigma_at(cfg, episode);
        let mut env = CoverageEnv::reset(cfg, &mut rng);
        let n = env.n();
        let mut obs: Vec<_> = (0..n).map(|i| store(&env.observe(i))).collect();
        let mut total = 0.0;
        let mut samples = 0usize;
        let mut updates = 0;
        let mut rejected = 0;
        let mut steps = 0;
        for _ in 0..cfg.t_a {
            let headings: Vec<f64> = obs
                .iter()
                .map(|s| agent.act(&super::replay::widen(s), Some(&mut rng)))
                .collect();
            let out = env.step(&headings);
            let terminal = out.collision || out.disconnected;
            steps += 1;
            for i in 0..n {
                let next = store(&env.observe(i));
                let r = out.rewards[i].total;
                total += r;
                samples += 1;
                buffer.push(Experience {
                    s: obs[i].clone(),
                    psi: headings[i],
                    r: r * cfg.reward_scale,
                    s_next: next.clone(),
                    terminal,
                });
                obs[i] = next;
            }
            if let Some(batch) = buffer.sample(&mut rng, cfg.batch_size) {
                let UpdateStats { rejected: bad, .. } = agent.update(&batch);
                updates += 1;
                rejected += bad as usize;
            }
            if terminal {
                break;
            }
        }
        let point = CurvePoint {
            episode,
            mean_reward: if samples > 0 { total / samples as f64 } else { 0.0 },
            sigma: agent.sigma,
            steps,
            updates,
            rejected,
        };
        log::debug!("episode {episode}: mean reward {:.4}", point.mean_reward);
        curve.push(point);
    }
    TrainOutcome {
        agent,
        curve,
        episode: cfg.episodes.max(first),
    }
}
