//! Actor-critic pair with TD-gated actor updates.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::mlp::{Cache, Head, Mlp};
use super::replay::{widen, Experience};
use crate::maps::LocalObservation;
use crate::model::{wrap_heading, MissionConfig};
use crate::policy::Policy;

/// Actor outputs are kept this far inside the open interval (-1, 1).
const ACT_LIMIT: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ActorCritic {
    pub actor: Mlp,
    pub critic: Mlp,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Current exploration noise scale.
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UpdateStats {
    /// Tuples with positive TD error, which moved the actor.
    pub positive: usize,
    pub mean_td: f64,
    /// The update produced a non-finite gradient and was dropped.
    pub rejected: bool,
}

pub fn layer_sizes(cfg: &MissionConfig) -> Vec<usize> {
    vec![2 * cfg.obs_size * cfg.obs_size, cfg.hidden, cfg.hidden, 1]
}

impl ActorCritic {
    pub fn new<R: Rng + ?Sized>(cfg: &MissionConfig, rng: &mut R) -> Self {
        let sizes = layer_sizes(cfg);
        Self {
            actor: Mlp::new(&sizes, Head::Tanh, rng),
            critic: Mlp::new(&sizes, Head::Linear, rng),
            alpha: cfg.alpha,
            beta: cfg.beta,
            gamma: cfg.gamma,
            sigma: cfg.sigma_start,
        }
    }

    /// Deterministic actor output, strictly inside (-1, 1).
    pub fn actor_output(&self, obs: &[f64]) -> f64 {
        self.actor.forward(obs).clamp(-ACT_LIMIT, ACT_LIMIT)
    }

    /// Heading to fly: the actor output, plus wrapped Gaussian noise of the
    /// current scale when an RNG is supplied.
    pub fn act<R: Rng + ?Sized>(&self, obs: &[f64], noise: Option<&mut R>) -> f64 {
        let a = self.actor_output(obs);
        match noise {
            Some(rng) if self.sigma > 0.0 => {
                let n = Normal::new(0.0, self.sigma).expect("finite sigma").sample(rng);
                wrap_heading(a + n)
            }
            _ => a,
        }
    }

    pub fn value(&self, obs: &[f64]) -> f64 {
        self.critic.forward(obs)
    }

    pub fn td_error(&self, e: &Experience) -> f64 {
        let v = self.value(&widen(&e.s));
        let next = if e.terminal { 0.0 } else { self.value(&widen(&e.s_next)) };
        e.r + self.gamma * next - v
    }

    /// One step on a batch. TD errors all use the parameters from before the
    /// step; gradients are summed over the batch.
    pub fn update(&mut self, batch: &[&Experience]) -> UpdateStats {
        let deltas: Vec<f64> = batch.iter().map(|e| self.td_error(e)).collect();
        let mut g_critic = vec![0.0; self.critic.param_count()];
        let mut g_actor = vec![0.0; self.actor.param_count()];
        let mut cache = Cache::default();
        let mut positive = 0;
        for (e, &delta) in batch.iter().zip(&deltas) {
            let s = widen(&e.s);
            self.critic.forward_cached(&s, &mut cache);
            self.critic.backward(&cache, delta, &mut g_critic);
            if delta > 0.0 {
                positive += 1;
                let a = self.actor.forward_cached(&s, &mut cache).clamp(-ACT_LIMIT, ACT_LIMIT);
                // residual measured on the circle, so 0.95 -> -0.95 is a short step
                let residual = wrap_heading(e.psi - a);
                if residual != 0.0 {
                    self.actor.backward(&cache, residual, &mut g_actor);
                }
            }
        }
        let mean_td = if deltas.is_empty() { 0.0 } else { deltas.iter().sum::<f64>() / deltas.len() as f64 };
        if !g_critic.iter().chain(&g_actor).all(|g| g.is_finite()) {
            log::warn!("non-finite gradient; update rejected");
            return UpdateStats {
                positive,
                mean_td,
                rejected: true,
            };
        }
        for (p, g) in self.critic.params_mut().iter_mut().zip(&g_critic) {
            *p += self.beta * g;
        }
        if positive > 0 {
            for (p, g) in self.actor.params_mut().iter_mut().zip(&g_actor) {
                *p += self.alpha * g;
            }
        }
        UpdateStats {
            positive,
            mean_td,
            rejected: false,
        }
    }
}

impl Policy for ActorCritic {
    fn heading(&self, obs: &LocalObservation) -> f64 {
        self.actor_output(obs.as_slice())
    }
}
