//! Fully connected network with rectifier hidden layers and a scalar head.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    Tanh,
    Linear,
}

/// Layer `l` maps `sizes[l]` inputs to `sizes[l + 1]` outputs; its weights
/// (row-major, one row per output) are followed by its biases in `params`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    sizes: Vec<usize>,
    head: Head,
    params: Vec<f64>,
}

/// Activations kept from a forward pass for the backward pass.
#[derive(Debug, Default, Clone)]
pub struct Cache {
    /// Post-activation output of each layer, input first.
    acts: Vec<Vec<f64>>,
    out: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four lanes so the compiler can vectorise; order is fixed, so results are reproducible
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

impl Mlp {
    /// Uniform initialisation in `+-1/sqrt(fan_in)`. `sizes` must end in 1.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], head: Head, rng: &mut R) -> Self {
        assert!(sizes.len() >= 2 && *sizes.last().unwrap() == 1, "scalar head expected");
        let mut params = Vec::new();
        for w in sizes.windows(2) {
            let bound = 1.0 / (w[0] as f64).sqrt();
            for _ in 0..w[0] * w[1] + w[1] {
                params.push(rng.random_range(-bound..bound));
            }
        }
        Self {
            sizes: sizes.to_vec(),
            head,
            params,
        }
    }

    pub fn from_parts(sizes: Vec<usize>, head: Head, params: Vec<f64>) -> Option<Self> {
        let ok = sizes.len() >= 2 && sizes.last() == Some(&1) && params.len() == Self::count(&sizes) && params.iter().all(|p| p.is_finite());
        ok.then_some(Self { sizes, head, params })
    }

    fn count(sizes: &[usize]) -> usize {
        sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn head(&self) -> Head {
        self.head
    }

    pub fn input_len(&self) -> usize {
        self.sizes[0]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let mut cache = Cache::default();
        self.forward_cached(x, &mut cache)
    }

    pub fn forward_cached(&self, x: &[f64], cache: &mut Cache) -> f64 {
        assert_eq!(x.len(), self.sizes[0], "input length");
        let layers = self.sizes.len() - 1;
        cache.acts.resize_with(layers + 1, Vec::new);
        cache.acts[0].clear();
        cache.acts[0].extend_from_slice(x);
        let mut off = 0;
        for l in 0..layers {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let w = &self.params[off..off + n_in * n_out];
            let b = &self.params[off + n_in * n_out..off + n_in * n_out + n_out];
            off += n_in * n_out + n_out;
            let (prev, rest) = cache.acts.split_at_mut(l + 1);
            let input = &prev[l];
            let out = &mut rest[0];
            out.clear();
            for o in 0..n_out {
                let z = b[o] + dot(&w[o * n_in..(o + 1) * n_in], input);
                out.push(if l + 1 < layers { z.max(0.0) } else { z });
            }
        }
        let z = cache.acts[layers][0];
        cache.out = match self.head {
            Head::Tanh => z.tanh(),
            Head::Linear => z,
        };
        cache.out
    }

    /// Accumulate `scale * d(out)/d(params)` into `grad`, using the cache of
    /// the most recent forward pass.
    pub fn backward(&self, cache: &Cache, scale: f64, grad: &mut [f64]) {
        let layers = self.sizes.len() - 1;
        let mut delta = vec![match self.head {
            Head::Tanh => scale * (1.0 - cache.out * cache.out),
            Head::Linear => scale,
        }];
        let offsets: Vec<usize> = self
            .sizes
            .windows(2)
            .scan(0, |acc, w| {
                let o = *acc;
                *acc += w[0] * w[1] + w[1];
                Some(o)
            })
            .collect();
        for l in (0..layers).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let off = offsets[l];
            let input = &cache.acts[l];
            let mut back = vec![0.0; if l > 0 { n_in } else { 0 }];
            for o in 0..n_out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let row = off + o * n_in;
                for (g, &x) in grad[row..row + n_in].iter_mut().zip(input) {
                    *g += d * x;
                }
                grad[off + n_in * n_out + o] += d;
                if l > 0 {
                    for (bk, &w) in back.iter_mut().zip(&self.params[row..row + n_in]) {
                        *bk += d * w;
                    }
                }
            }
            if l > 0 {
                // rectifier derivative, from the stored post-activations
                for (bk, &a) in back.iter_mut().zip(input) {
                    if a <= 0.0 {
                        *bk = 0.0;
                    }
                }
                delta = back;
            }
        }
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        diff / na.max(nb).max(1e-300)
    }

    #[test]
    fn output_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for head in [Head::Tanh, Head::Linear] {
            let net = Mlp::new(&[7, 5, 4, 1], head, &mut rng);
            let x: Vec<f64> = (0..7).map(|_| rng.random::<f64>()).collect();
            let mut cache = Cache::default();
            net.forward_cached(&x, &mut cache);
            let mut g = vec![0.0; net.param_count()];
            net.backward(&cache, 1.0, &mut g);
            let h = 1e-6;
            let fd: Vec<f64> = (0..net.param_count())
                .map(|k| {
                    let mut p = net.clone();
                    p.params_mut()[k] += h;
                    let up = p.forward(&x);
                    p.params_mut()[k] -= 2.0 * h;
                    (up - p.forward(&x)) / (2.0 * h)
                })
                .collect();
            assert!(rel_err(&g, &fd) < 1e-6, "{head:?}: {}", rel_err(&g, &fd));
        }
    }

    #[test]
    fn init_bounds_and_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = Mlp::new(&[16, 8, 8, 1], Head::Tanh, &mut rng);
        assert_eq!(net.param_count(), 16 * 8 + 8 + 8 * 8 + 8 + 8 + 1);
        assert!(net.params()[..128].iter().all(|w| w.abs() <= 0.25));
        assert!(Mlp::from_parts(vec![16, 8, 8, 1], Head::Tanh, net.params().to_vec()).is_some());
        assert!(Mlp::from_parts(vec![16, 8, 1], Head::Tanh, net.params().to_vec()).is_none());
    }

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..11).map(|i| i as f64 * 0.5).collect();
        let b: Vec<f64> = (0..11).map(|i| 1.0 - i as f64).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-12);
    }
}
