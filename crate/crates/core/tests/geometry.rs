use mixshape::geometry::{
    align, embed_labeled, reconstruct_unlabeled, shape_distance, DistanceMultiset, PointConfig, SearchOptions,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn line(xs: &[f64]) -> PointConfig<f64> {
    PointConfig::new(xs.iter().map(|&x| vec![x]).collect()).unwrap()
}

fn differences(xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            out.push((xs[i] - xs[j]).abs());
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn sorted_gap(a: &DistanceMultiset<f64>, b: &DistanceMultiset<f64>) -> f64 {
    a.max_gap(b).unwrap()
}

#[test]
fn one_dimensional_matches_brute_force() {
    // every placement 0 = x0 < x1 < x2 with integer coordinates whose
    // differences are {1, 2, 3}
    let mut brute = Vec::new();
    for x1 in 1..10 {
        for x2 in x1 + 1..10 {
            let xs = [0.0, x1 as f64, x2 as f64];
            if differences(&xs) == vec![1.0, 2.0, 3.0] {
                brute.push(line(&xs));
            }
        }
    }
    assert_eq!(brute.len(), 2);
    assert!(shape_distance(&brute[0], &brute[1]).unwrap() < 1e-12);

    let ms = DistanceMultiset::new(vec![1.0, 4.0, 9.0]).unwrap();
    let r = reconstruct_unlabeled(&ms, 1, &SearchOptions::default()).unwrap();
    assert_eq!(r.solutions.len(), 1);
    for b in &brute {
        assert!(shape_distance(&r.solutions[0].config, b).unwrap() < 1e-12);
    }
}

#[test]
fn homometric_pair_is_reconstructed_soundly() {
    let a = [0.0, 1.0, 4.0, 10.0, 12.0, 17.0];
    let b = [0.0, 1.0, 8.0, 11.0, 13.0, 17.0];
    assert_eq!(differences(&a), differences(&b));
    assert!(shape_distance(&line(&a), &line(&b)).unwrap() > 0.1);

    let ms = line(&a).distance_multiset();
    let r = reconstruct_unlabeled(&ms, 1, &SearchOptions::default()).unwrap();
    assert!(r.complete);
    assert!(!r.solutions.is_empty());
    for sol in &r.solutions {
        assert!(sorted_gap(&sol.config.distance_multiset(), &ms) < 1e-9);
    }
}

fn generic_config(k: usize, d: usize) -> impl Strategy<Value = PointConfig<f64>> {
    prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), k).prop_filter_map(
        "pairwise squared distances must differ by at least 0.1",
        |pts| {
            let c = PointConfig::new(pts).ok()?;
            let v = c.distance_multiset();
            let vals = v.values();
            let spaced = vals.windows(2).all(|w| w[1] - w[0] >= 0.1);
            (spaced && vals.first().is_none_or(|&x| x >= 0.1)).then_some(c)
        },
    )
}

fn sized(ks: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PointConfig<f64>> {
    (ks, 1usize..=3).prop_flat_map(|(k, d)| generic_config(k, d))
}

fn check_round_trip(truth: &PointConfig<f64>) -> Result<(), TestCaseError> {
    let ms = truth.distance_multiset();
    let opts = SearchOptions {
        tol: 1e-6,
        budget: u64::MAX,
    };
    let r = reconstruct_unlabeled(&ms, truth.d(), &opts).unwrap();
    prop_assert!(r.complete);
    let best = r
        .solutions
        .iter()
        .map(|s| shape_distance(&s.config, truth).unwrap())
        .fold(f64::INFINITY, f64::min);
    prop_assert!(best <= 1e-6, "closest solution at {best}");
    let tol = 1e-6 * ms.max().unwrap_or(1.0);
    for sol in &r.solutions {
        prop_assert!(sorted_gap(&sol.config.distance_multiset(), &ms) <= tol);
    }
    Ok(())
}

fn fixed(cases: u32, seed: u64) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

proptest! {
    #![proptest_config(fixed(48, 0x5eed_0001))]

    #[test]
    fn round_trip_up_to_six_points(truth in sized(2..=6)) {
        check_round_trip(&truth)?;
    }
}

proptest! {
    #![proptest_config(fixed(4, 0x5eed_0002))]

    #[test]
    fn round_trip_seven_points(truth in sized(7..=7)) {
        check_round_trip(&truth)?;
    }
}

fn any_config() -> impl Strategy<Value = PointConfig<f64>> {
    (1usize..=8, 1usize..=4).prop_flat_map(|(k, d)| {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), k).prop_map(|pts| PointConfig::new(pts).unwrap())
    })
}

proptest! {
    #![proptest_config(fixed(128, 0x5eed_0003))]

    #[test]
    fn embedding_inverts_distance_matrix(truth in any_config()) {
        let d = truth.d();
        let c = embed_labeled(&truth.sq_distances(), d, (d, 0), 1e-9).unwrap();
        let al = align(&c, &truth).unwrap();
        prop_assert!(al.rms <= 1e-9, "rms {}", al.rms);
        // labels are preserved, not merely the shape
        let dm = c.sq_distances();
        let tm = truth.sq_distances();
        for i in 0..truth.k() {
            for j in 0..truth.k() {
                prop_assert!((dm[(i, j)] - tm[(i, j)]).abs() <= 1e-9 * (1.0 + tm[(i, j)]));
            }
        }
    }

    #[test]
    fn shape_distance_is_symmetric(
        (a, b) in (1usize..=7, 1usize..=3).prop_flat_map(|(k, d)| {
            let pts = prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), k);
            (pts.clone(), pts)
        })
    ) {
        let a = PointConfig::new(a).unwrap();
        let b = PointConfig::new(b).unwrap();
        let ab = shape_distance(&a, &b).unwrap();
        let ba = shape_distance(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12, "{ab} vs {ba}");
    }
}
