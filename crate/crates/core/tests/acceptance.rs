//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use mixshape::pipeline::node_count;
use mixshape::weights::products_of;
use mixshape::{
    empirical_moments, exact_moments, exact_power_sums, moments_to_power_sums, power_sums_to_moments, prony_recover,
    reconstruct_unlabeled, recover_mixture, recover_weights, sample_deltas, shape_distance, Model, PointConfig,
    PowerSums, PronyOptions, SearchOptions, Source, Wide,
};
use num_traits::Float;
use rand::Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(t: Duration) -> f64 {
    t.as_secs_f64()
}

fn exact_round_trip() -> Outcome {
    let mut rng = rng(0xacc1);
    let start = Instant::now();
    let (mut shape, mut weight, mut failures) = (0.0f64, 0.0f64, 0);
    for _ in 0..100 {
        let k = rng.gen_range(2..=6);
        let d = rng.gen_range(1..=3);
        let truth = admissible_model(&mut rng, k, d, 0.1, 0.05);
        let p = wide_power_sums(&truth, 2 * node_count(k) - 1);
        match recover_mixture(&Source::PowerSums(p), k, d, None) {
            Ok(r) => {
                let (s, w) = model_errors(&r.recovered.cast(), &truth);
                shape = shape.max(s);
                weight = weight.max(w);
            }
            Err(_) => failures += 1,
        }
    }
    let t = start.elapsed();
    outcome(
        failures == 0 && shape <= 1e-5 && weight <= 1e-6 && t.as_secs_f64() <= 60.0,
        format!(
            "100 mixtures, {failures} errors, max shape distance {shape:.1e}, max weight error {weight:.1e}, {:.1} s",
            secs(t)
        ),
    )
}

fn prony_oracle() -> Outcome {
    let mut rng = rng(0xacc2);
    let opts = PronyOptions::exact::<Wide>();
    let (mut worst, mut failures) = (0.0f64, 0);
    for _ in 0..200 {
        let kn = rng.gen_range(1..=6);
        let nodes: Vec<f64> = loop {
            let mut x: Vec<f64> = (0..kn).map(|_| rng.gen::<f64>()).collect();
            x.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if x.windows(2).all(|w| w[1] - w[0] >= 0.05) {
                break x;
            }
        };
        let weights: Vec<f64> = (0..kn).map(|_| rng.gen_range(0.05..=1.0)).collect();
        let p: Vec<Wide> = (0..2 * kn)
            .map(|n| {
                nodes
                    .iter()
                    .zip(&weights)
                    .map(|(&x, &a)| Wide::from(a) * Wide::from(x).powi(n as i32))
                    .sum()
            })
            .collect();
        match prony_recover(&PowerSums::new(p), kn, &opts) {
            Ok(fit) => {
                for (&(a, x), (&tx, &ta)) in fit.nodes.iter().zip(nodes.iter().zip(&weights)) {
                    worst = worst.max((f64::from(x) - tx).abs()).max((f64::from(a) - ta).abs());
                }
            }
            Err(_) => failures += 1,
        }
    }
    outcome(
        failures == 0 && worst <= 1e-8,
        format!("200 node sets, {failures} errors, max node/weight error {worst:.1e}"),
    )
}

fn power_sum_invariance() -> Outcome {
    let mut rng = rng(0xacc3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let k = rng.gen_range(1..=6);
        let d = rng.gen_range(1..=3);
        let m = Model::euclidean(
            random_weights(&mut rng, k, 0.05),
            (0..k)
                .map(|_| (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect())
                .collect(),
        )
        .unwrap();
        let q = random_orthogonal(&mut rng, d);
        let shift: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let perm = random_permutation(&mut rng, k);
        let moved = m.moved(&q, &shift).unwrap().relabeled(&perm).unwrap();
        let a = exact_power_sums(&m, 10);
        let b = exact_power_sums(&moved, 10);
        for (x, y) in a.values.iter().zip(&b.values) {
            worst = worst.max(relative_gap(*x, *y));
        }
    }
    outcome(worst <= 1e-9, format!("50 models, max relative difference {worst:.1e}"))
}

fn monte_carlo_moments() -> Outcome {
    let mut rng = rng(0xacc4);
    let mut worst = 0.0f64;
    let start = Instant::now();
    for i in 0..10u64 {
        let k = rng.gen_range(1..=4);
        let d = rng.gen_range(1..=3);
        let m = Model::euclidean(
            random_weights(&mut rng, k, 0.05),
            (0..k)
                .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect(),
        )
        .unwrap();
        let exact = exact_moments(&m, 2).unwrap();
        let emp = empirical_moments::<f64>(&sample_deltas(&m, 1_000_000, 4000 + i), 2, d).unwrap();
        let se = emp.stderr.unwrap();
        for ((e, x), s) in emp.values.iter().zip(&exact.values).zip(&se).skip(1) {
            worst = worst.max((e - x).abs() / s);
        }
    }
    outcome(
        worst <= 4.0,
        format!(
            "10 models, N = 1e6, largest deviation {worst:.2} standard errors, {:.1} s",
            secs(start.elapsed())
        ),
    )
}

fn triangular_round_trip() -> Outcome {
    let mut rng = rng(0xacc5);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let d = [1, 2, 3, 5][i % 4];
        let k = rng.gen_range(1..=5);
        let m = Model::euclidean(
            random_weights(&mut rng, k, 0.05),
            (0..k)
                .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect(),
        )
        .unwrap();
        let mv = exact_moments(&m, 12).unwrap();
        let back = power_sums_to_moments(&moments_to_power_sums(&mv).unwrap(), d);
        for (x, y) in mv.values.iter().zip(&back.values) {
            worst = worst.max(relative_gap(*x, *y));
        }
    }
    outcome(
        worst <= 1e-10,
        format!("50 models, orders 0..12, max relative error {worst:.1e}"),
    )
}

fn empirical_end_to_end() -> Outcome {
    let start = Instant::now();
    let truth = Model::euclidean(vec![0.3, 0.7], vec![vec![0.0, 0.0], vec![4.0, 0.0]]).unwrap();
    let samples = sample_deltas(&truth, 1_000_000, 6);
    let r = match recover_mixture::<f64>(&Source::Deltas(samples), 2, 2, None) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("recovery failed: {e}")),
    };
    let t = start.elapsed();
    let delta = r.recovered.mean_sq_distances()[(0, 1)];
    let mut w = r.recovered.weights().to_vec();
    w.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rel = (delta - 16.0).abs() / 16.0;
    let werr = (w[0] - 0.3).abs().max((w[1] - 0.7).abs());
    outcome(
        rel <= 0.05 && werr <= 0.05 && t.as_secs_f64() <= 30.0,
        format!(
            "delta {delta:.4} ({:.2}% off), weights ({:.4}, {:.4}), {:.2} s",
            100.0 * rel,
            w[0],
            w[1],
            secs(t)
        ),
    )
}

fn homometric_soundness() -> Outcome {
    let a = [0.0, 1.0, 4.0, 10.0, 12.0, 17.0];
    let b = [0.0, 1.0, 8.0, 11.0, 13.0, 17.0];
    let diffs = |xs: &[f64]| {
        let mut v: Vec<f64> = (0..xs.len())
            .flat_map(|i| (i + 1..xs.len()).map(move |j| (i, j)))
            .map(|(i, j)| (xs[j] - xs[i]).abs())
            .collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v
    };
    if diffs(&a) != diffs(&b) {
        return outcome(false, "difference multisets differ".into());
    }
    let line = |xs: &[f64]| PointConfig::new(xs.iter().map(|&x| vec![x]).collect()).unwrap();
    let (ca, cb) = (line(&a), line(&b));
    let ms = ca.distance_multiset();
    let r = match reconstruct_unlabeled(&ms, 1, &SearchOptions::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("search failed: {e}")),
    };
    let tol = 1e-9 * ms.max().unwrap();
    let sound = r
        .solutions
        .iter()
        .all(|s| s.config.distance_multiset().max_gap(&ms).unwrap() <= tol);
    let found = |c: &PointConfig<f64>| {
        r.solutions
            .iter()
            .any(|s| shape_distance(&s.config, c).unwrap() <= 1e-9)
    };
    outcome(
        sound && !r.solutions.is_empty(),
        format!(
            "{} solutions, all regenerate the multiset: {sound}; both sets found: {}",
            r.solutions.len(),
            found(&ca) && found(&cb)
        ),
    )
}

fn weight_exactness() -> Outcome {
    let mut rng = rng(0xacc8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let k = rng.gen_range(2..=8);
        let w = random_weights(&mut rng, k, 0.0);
        match recover_weights(&products_of(&w)) {
            Ok(r) => {
                for (x, y) in sorted(&r.weights).iter().zip(sorted(&w)) {
                    worst = worst.max((x - y).abs());
                }
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    let mut zero = 0.0f64;
    for _ in 0..20 {
        let k = rng.gen_range(2..=6);
        let d = rng.gen_range(1..=3);
        let truth = admissible_model(&mut rng, k, d, 0.1, 0.05);
        let p = wide_power_sums(&truth, 2 * node_count(k) - 1);
        match recover_mixture(&Source::PowerSums(p), k, d, None) {
            Ok(r) => zero = zero.max(r.residuals.zero_node_defect),
            Err(_) => zero = f64::INFINITY,
        }
    }
    outcome(
        worst <= 1e-10 && zero <= 1e-8,
        format!("100 weight vectors, max error {worst:.1e}; 20 pipeline runs, max |Σπ² − a_0| {zero:.1e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exact round trip", exact_round_trip),
        ("prony oracle", prony_oracle),
        ("power-sum invariance", power_sum_invariance),
        ("monte carlo moments", monte_carlo_moments),
        ("triangular round trip", triangular_round_trip),
        ("empirical end to end", empirical_end_to_end),
        ("homometric soundness", homometric_soundness),
        ("weight exactness", weight_exactness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| outcome(false, "panicked".into()));
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} [{name}]: {} ({})",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
