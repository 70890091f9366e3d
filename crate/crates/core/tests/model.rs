mod common;

use common::fixed;
use mixshape::linalg::Matrix;
use mixshape::model::sq_distance;
use mixshape::sampling::sample_deltas_by_pair;
use mixshape::{empirical_moments, sample_deltas, sample_points, DistanceForm, Model};
use proptest::prelude::*;

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let m = Model::euclidean(vec![0.2, 0.8], vec![vec![0.0, 1.0], vec![3.0, -1.0]]).unwrap();
    let a = sample_deltas(&m, 200_000, 17);
    let b = sample_deltas(&m, 200_000, 17);
    assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_ne!(a.values, sample_deltas(&m, 200_000, 18).values);
    let p = sample_points(&m, 1000, 17);
    assert_eq!(p, sample_points(&m, 1000, 17));
}

#[test]
fn sampling_routes_agree_in_law() {
    let m = Model::euclidean(vec![0.35, 0.65], vec![vec![0.0, 0.0], vec![1.5, 2.0]]).unwrap();
    let (a, sa) = mean_and_se(&sample_deltas(&m, 100_000, 1).values);
    let (b, sb) = mean_and_se(&sample_deltas_by_pair(&m, 100_000, 2).values);
    assert!((a - b).abs() <= 4.0 * (sa * sa + sb * sb).sqrt(), "{a} vs {b}");
}

#[test]
fn empirical_moments_match_the_sample_mean() {
    let m = Model::euclidean(vec![1.0], vec![vec![0.0]]).unwrap();
    let s = sample_deltas(&m, 50_000, 3);
    let mv = empirical_moments::<f64>(&s, 1, 1).unwrap();
    let (mean, se) = mean_and_se(&s.values);
    assert!((mv.values[1] - mean).abs() < 1e-12 * mean);
    assert!((mv.stderr.unwrap()[1] - se).abs() < 1e-9 * se);
}

fn form(kind: u8, d: usize, seed: &[f64]) -> DistanceForm<f64> {
    match kind {
        0 => DistanceForm::Euclidean,
        1 => DistanceForm::diagonal((0..d).map(|i| if seed[i] < 0.0 { -1 } else { 1 }).collect()).unwrap(),
        _ => {
            // diagonally dominant, hence non-degenerate
            let m = Matrix::from_fn(d, d, |i, j| {
                if i == j {
                    4.0 + seed[i].abs()
                } else {
                    0.5 * (seed[i] + seed[j]) / d as f64
                }
            });
            DistanceForm::matrix(m).unwrap()
        }
    }
}

proptest! {
    #![proptest_config(fixed(256, 0x5eed_0101))]

    #[test]
    fn squared_distance_is_symmetric_and_translation_invariant(
        (kind, u, v, c, seed) in (0u8..3, 1usize..=4).prop_flat_map(|(kind, d)| {
            let coords = prop::collection::vec(-5.0f64..5.0, d);
            (Just(kind), coords.clone(), coords.clone(), coords.clone(), coords)
        })
    ) {
        let f = form(kind, u.len(), &seed);
        let uv = sq_distance(&f, &u, &v).unwrap();
        prop_assert_eq!(uv.to_bits(), sq_distance(&f, &v, &u).unwrap().to_bits());
        let shift = |x: &[f64]| x.iter().zip(&c).map(|(a, b)| a + b).collect::<Vec<_>>();
        let moved = sq_distance(&f, &shift(&u), &shift(&v)).unwrap();
        // relative to the squared coordinate scale, which bounds the rounding
        let scale = shift(&u).iter().chain(&shift(&v)).fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!((moved - uv).abs() <= 1e-12 * scale * scale, "{moved} vs {uv}");
    }
}
