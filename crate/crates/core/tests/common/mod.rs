#![allow(dead_code)]

use mixshape::linalg::Matrix;
use mixshape::{exact_power_sums, Model, PointConfig, Wide, WideSums};
use proptest::test_runner::{Config, RngSeed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Proptest configuration with a pinned seed and no failure files.
pub fn fixed(cases: u32, seed: u64) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Weights bounded below by `min`, summing to 1.
pub fn random_weights(rng: &mut impl Rng, k: usize, min: f64) -> Vec<f64> {
    let u: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = u.iter().sum();
    let free = 1.0 - min * k as f64;
    let mut w: Vec<f64> = u.iter().map(|x| min + free * x / total).collect();
    // absorb rounding into the largest entry
    let err = 1.0 - w.iter().sum::<f64>();
    let top = (0..k).max_by(|&a, &b| w[a].partial_cmp(&w[b]).unwrap()).unwrap();
    w[top] += err;
    w
}

/// Points uniform in `[−5, 5]^d` whose squared distances are at least
/// `gap` apart from each other and from 0.
pub fn generic_points(rng: &mut impl Rng, k: usize, d: usize, gap: f64) -> Vec<Vec<f64>> {
    loop {
        let pts: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect())
            .collect();
        let mut v = PointConfig::new(pts.clone())
            .unwrap()
            .distance_multiset()
            .values()
            .to_vec();
        v.insert(0, 0.0);
        if v.windows(2).all(|w| w[1] - w[0] >= gap) {
            return pts;
        }
    }
}

/// Admissible model: generic means, weights at least `wmin`.
pub fn admissible_model(rng: &mut impl Rng, k: usize, d: usize, gap: f64, wmin: f64) -> Model {
    let means = generic_points(rng, k, d, gap);
    Model::euclidean(random_weights(rng, k, wmin), means).unwrap()
}

/// Random orthogonal matrix, a reflection with probability ½.
pub fn random_orthogonal(rng: &mut impl Rng, d: usize) -> Matrix<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for c in &cols {
            let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    if rng.gen::<bool>() {
        for x in &mut cols[0] {
            *x = -*x;
        }
    }
    Matrix::from_fn(d, d, |i, j| cols[j][i])
}

pub fn random_permutation(rng: &mut impl Rng, k: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..k).collect();
    p.shuffle(rng);
    p
}

pub fn wide_power_sums(m: &Model, max_order: usize) -> WideSums {
    exact_power_sums(&m.cast::<Wide>(), max_order)
}

pub fn config(m: &Model) -> PointConfig<f64> {
    PointConfig::new(m.means().to_vec()).unwrap()
}

/// Shape distance of the means and the largest weight error. Labels are
/// matched by the best alignment among those pairing weights within 1e-6,
/// falling back to the unrestricted alignment.
pub fn model_errors(got: &Model, truth: &Model) -> (f64, f64) {
    let (a, b) = (config(got), config(truth));
    let (wg, wt) = (got.weights(), truth.weights());
    let al = mixshape::align_with(&a, &b, |i, j| (wg[i] - wt[j]).abs() <= 1e-6)
        .or_else(|_| mixshape::align(&a, &b))
        .unwrap();
    let werr = (0..got.k())
        .map(|i| (wg[i] - wt[al.permutation[i]]).abs())
        .fold(0.0, f64::max);
    (al.rms, werr)
}

pub fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}
