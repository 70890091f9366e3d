//! Deterministic sampling of mixture points and squared distances.
//!
//! Generator: ChaCha8 (`rand_chacha`), seeded with `seed_from_u64(seed)`.
//! Draws are produced in fixed chunks of [`CHUNK`] items; chunk `c` uses
//! ChaCha stream `c` of that key, so every chunk has its own
//! non-overlapping keystream and the output does not depend on how many
//! threads generate the chunks.
//!
//! Normal variates come from the ziggurat sampler of `rand_distr`
//! (`StandardNormal`), uniforms from `Rng::gen::<f64>()` on `[0, 1)`.
//! A component is picked by inverse CDF on the cumulative weights: the
//! first index `i` with `u < cum[i]`, falling back to the last index if
//! rounding leaves `cum[k-1]` below `u`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::model::{DistanceForm, FormKind, MixtureModel};
use crate::scalar::Real;

/// Items generated per RNG stream.
pub const CHUNK: usize = 1 << 16;

/// Empirical draws of the squared distance between two mixture samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSamples {
    pub values: Vec<f64>,
    /// Seed that generated the draws, when known.
    pub seed: Option<u64>,
    pub form_kind: FormKind,
}

impl DeltaSamples {
    pub fn new(values: Vec<f64>, seed: Option<u64>, form_kind: FormKind) -> Self {
        DeltaSamples {
            values,
            seed,
            form_kind,
        }
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }
}

struct Sampler {
    cumulative: Vec<f64>,
    means: Vec<Vec<f64>>,
    form: DistanceForm<f64>,
}

impl Sampler {
    fn new<T: Real>(model: &MixtureModel<T>) -> Self {
        let m = model.cast::<f64>();
        let mut acc = 0.0;
        let cumulative = m
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Sampler {
            cumulative,
            means: m.means().to_vec(),
            form: m.form().clone(),
        }
    }

    fn d(&self) -> usize {
        self.means[0].len()
    }

    fn component(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.gen();
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1)
    }

    fn point(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, usize) {
        let i = self.component(rng);
        let x = self.means[i]
            .iter()
            .map(|&m| m + rng.sample::<f64, _>(StandardNormal))
            .collect();
        (x, i)
    }

    fn delta(&self, rng: &mut ChaCha8Rng) -> f64 {
        let (a, _) = self.point(rng);
        let (b, _) = self.point(rng);
        let w: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        self.form.quadratic(&w)
    }

    fn delta_by_pair(&self, rng: &mut ChaCha8Rng) -> f64 {
        let i = self.component(rng);
        let j = self.component(rng);
        let z: Vec<f64> = (0..self.d())
            .map(|l| {
                let n: f64 = rng.sample(StandardNormal);
                self.means[i][l] - self.means[j][l] + std::f64::consts::SQRT_2 * n
            })
            .collect();
        self.form.quadratic(&z)
    }
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn chunked<R, F>(n: usize, seed: u64, draw: F) -> Vec<R>
where
    R: Send,
    F: Fn(&mut ChaCha8Rng) -> R + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<R>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            let mut rng = chunk_rng(seed, c);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// `n` independent draws from the mixture, each with the index of the
/// component that produced it.
pub fn sample_points<T: Real>(model: &MixtureModel<T>, n: usize, seed: u64) -> Vec<(Vec<f64>, usize)> {
    let s = Sampler::new(model);
    chunked(n, seed, |rng| s.point(rng))
}

/// `n` squared distances between pairs of independent mixture draws.
pub fn sample_deltas<T: Real>(model: &MixtureModel<T>, n: usize, seed: u64) -> DeltaSamples {
    let s = Sampler::new(model);
    DeltaSamples::new(chunked(n, seed, |rng| s.delta(rng)), Some(seed), model.form().kind())
}

/// Same law as [`sample_deltas`], drawn through the component pair: pick
/// `(i, j)` with probability `π_i π_j`, then `Δ = B(z, z)` with
/// `z ~ N(μ_i − μ_j, 2I)`.
pub fn sample_deltas_by_pair<T: Real>(model: &MixtureModel<T>, n: usize, seed: u64) -> DeltaSamples {
    let s = Sampler::new(model);
    DeltaSamples::new(
        chunked(n, seed, |rng| s.delta_by_pair(rng)),
        Some(seed),
        model.form().kind(),
    )
}
