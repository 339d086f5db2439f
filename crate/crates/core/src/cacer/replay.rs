use std::sync::Arc;

use rand::Rng;

use crate::maps::LocalObservation;

/// Observation stored at single precision; consecutive tuples of one drone
/// share the buffer between `s_next` and the following `s`.
pub type StoredObs = Arc<[f32]>;

pub fn store(obs: &LocalObservation) -> StoredObs {
    obs.as_slice().iter().map(|&v| v as f32).collect()
}

pub fn widen(obs: &[f32]) -> Vec<f64> {
    obs.iter().map(|&v| v as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experience {
    pub s: StoredObs,
    pub psi: f64,
    pub r: f64,
    pub s_next: StoredObs,
    /// The transition ended in a collision; the next state is not bootstrapped.
    pub terminal: bool,
}

/// Bounded FIFO with uniform sampling without replacement.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Experience>,
    next: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self {
            capacity,
            items: Vec::new(),
            next: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, e: Experience) {
        if self.items.len() < self.capacity {
            self.items.push(e);
        } else {
            self.items[self.next] = e;
        }
        self.next = (self.next + 1) % self.capacity;
    }

    /// `n` distinct tuples, or `None` while the buffer holds fewer than `n`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Option<Vec<&Experience>> {
        if self.items.len() < n {
            return None;
        }
        Some(rand::seq::index::sample(rng, self.items.len(), n).into_iter().map(|i| &self.items[i]).collect())
    }
}
