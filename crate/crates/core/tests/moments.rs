mod common;

use common::*;
use mixshape::moments::MomentSource;
use mixshape::{
    empirical_moments, exact_moments, exact_power_sums, moments_to_power_sums, power_sums_to_moments, sample_deltas,
    Model, MomentVector,
};
use proptest::prelude::*;

fn any_model() -> impl Strategy<Value = Model> {
    (1usize..=6, 1usize..=3).prop_flat_map(|(k, d)| {
        (
            prop::collection::vec(0.05f64..1.0, k),
            prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), k),
        )
            .prop_map(|(w, means)| {
                let total: f64 = w.iter().sum();
                let mut w: Vec<f64> = w.iter().map(|x| x / total).collect();
                let err = 1.0 - w.iter().sum::<f64>();
                w[0] += err;
                Model::euclidean(w, means).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(fixed(64, 0x5eed_0201))]

    #[test]
    fn power_sums_are_rigid_motion_invariant(m in any_model(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = random_orthogonal(&mut r, m.d());
        let shift: Vec<f64> = (0..m.d()).map(|i| i as f64 * 3.7 - 2.0).collect();
        let moved = m.moved(&q, &shift).unwrap().relabeled(&random_permutation(&mut r, m.k())).unwrap();
        let a = exact_power_sums(&m, 10);
        let b = exact_power_sums(&moved, 10);
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!(relative_gap(*x, *y) <= 1e-9);
        }
    }

    #[test]
    fn moment_maps_invert_each_other(m in any_model(), d in prop::sample::select(vec![1usize, 2, 3, 5])) {
        let p = exact_power_sums(&m, 12);
        let mv = power_sums_to_moments(&p, d);
        let back = moments_to_power_sums(&mv).unwrap();
        let mv2 = power_sums_to_moments(&back, d);
        for (x, y) in mv.values.iter().zip(&mv2.values) {
            prop_assert!(relative_gap(*x, *y) <= 1e-10);
        }
        let span = p.values.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        for (n, (x, y)) in p.values.iter().zip(&back.values).enumerate() {
            // p_n can be tiny next to the moments it is computed from
            prop_assert!((x - y).abs() <= 1e-9 * span.max(mv.values[n]), "order {n}: {x} vs {y}");
        }
    }

    #[test]
    fn equal_weights_give_plain_distance_sums(
        means in (2usize..=6, 1usize..=3).prop_flat_map(|(k, d)| {
            prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), k)
        })
    ) {
        let k = means.len();
        let m = Model::equal_weights(means, mixshape::DistanceForm::Euclidean).unwrap();
        let delta = m.mean_sq_distances();
        let p = exact_power_sums(&m, 6);
        for n in 0..=6 {
            let pairs: f64 = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .map(|(i, j)| delta[(i, j)].powi(n as i32))
                .sum();
            let diagonal = if n == 0 { 1.0 / k as f64 } else { 0.0 };
            let oracle = 2.0 / (k * k) as f64 * pairs + diagonal;
            prop_assert!(relative_gap(p.values[n], oracle) <= 1e-12);
        }
    }

    #[test]
    fn mean_distance_is_twice_the_dimension_plus_p1(m in any_model()) {
        let mv = exact_moments(&m, 1).unwrap();
        let p1 = exact_power_sums(&m, 1).values[1];
        prop_assert!(relative_gap(mv.values[1], 2.0 * m.d() as f64 + p1) <= 1e-14);
    }
}

#[test]
fn power_sums_depend_only_on_lower_moments() {
    let m = Model::euclidean(
        vec![0.1, 0.2, 0.7],
        vec![vec![0.0, 1.0], vec![2.0, 0.5], vec![-1.0, -1.0]],
    )
    .unwrap();
    let mv = exact_moments(&m, 8).unwrap();
    let base = moments_to_power_sums(&mv).unwrap();
    for n in 0..8 {
        let mut bumped = mv.clone();
        bumped.values[n + 1] *= 1.5;
        let p = moments_to_power_sums(&bumped).unwrap();
        assert_eq!(p.values[..=n], base.values[..=n], "order {n}");
        assert_ne!(p.values[n + 1], base.values[n + 1]);
    }
}

#[test]
fn monte_carlo_agrees_with_exact_moments() {
    let m = Model::euclidean(vec![0.25, 0.75], vec![vec![0.0, 0.0, 0.0], vec![1.0, -2.0, 0.5]]).unwrap();
    let exact = exact_moments(&m, 2).unwrap();
    let emp = empirical_moments::<f64>(&sample_deltas(&m, 1_000_000, 99), 2, 3).unwrap();
    assert_eq!(emp.source, MomentSource::Empirical);
    let se = emp.stderr.as_ref().unwrap();
    for (n, ((e, x), s)) in emp.values.iter().zip(&exact.values).zip(se).enumerate().skip(1) {
        assert!((e - x).abs() <= 4.0 * s, "order {n}");
    }
}

#[test]
fn standard_errors_survive_the_inverse_map() {
    let mv = MomentVector {
        values: vec![1.0, 6.0, 48.0],
        d: 3,
        source: MomentSource::Empirical,
        stderr: Some(vec![0.0, 0.1, 0.2]),
    };
    let p = moments_to_power_sums(&mv).unwrap();
    let se = p.stderr.unwrap();
    assert_eq!(se.len(), 3);
    assert_eq!(se[0], 0.0);
    assert!(se[1] > 0.0 && se[2] > 0.0);
}
