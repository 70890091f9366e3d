//! End-to-end recovery: power sums or distance samples to a mixture model.
//!
//! The stages are: power sums (from samples through the moment map),
//! Prony with `K = k(k−1)/2 + 1` nodes, identification of the node at 0
//! (weight `Σ π_i²`), labeling of the remaining nodes by point pairs,
//! weights from the labeled products `a_m / 2 = π_i π_j`, a classical
//! embedding of the labeled distance matrix, and a forward check of the
//! regenerated power sums.
//!
//! Labeling first tries the products alone. With points ordered by
//! decreasing weight, pair (0,1) carries the largest product and (0,2) the
//! largest remaining one; guessing the node of (1,2) fixes `π_0² =
//! q_01 q_02 / q_12`, after which each further point `t` takes the largest
//! unused product for (0,t) and every other pair (i,t) must find an unused
//! node with product `π_i π_t`. Near-ties branch. If the branching exceeds
//! a limit (many equal weights) or yields nothing, the labeling is taken
//! from [`reconstruct_unlabeled`] on the node positions instead.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result, Stage};
use crate::geometry::{align_with, embed_labeled, reconstruct_unlabeled, DistanceMultiset, PointConfig, SearchOptions};
use crate::linalg::Matrix;
use crate::model::{FormKind, MixtureModel};
use crate::moments::{empirical_moments, exact_power_sums, moments_to_power_sums, PowerSums};
use crate::prony::{estimate_node_count, node_scale, prony_recover, PronyOptions};
use crate::sampling::DeltaSamples;
use crate::scalar::Real;
use crate::weights::{recover_weights_with, ProductAssignment};

/// Input of [`recover_mixture`].
#[derive(Debug, Clone, PartialEq)]
pub enum Source<T> {
    /// Power sums `p_0 .. p_L`; standard errors, when present, select the
    /// empirical tolerances.
    PowerSums(PowerSums<T>),
    /// Squared distances between independent draws (euclidean form).
    Deltas(DeltaSamples),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Empirical,
}

/// Tolerances of one recovery run. All are relative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub mode: Mode,
    pub prony: PronyOptions,
    /// The node nearest 0 must satisfy `|x| ≤ zero · max_m |x_m|`.
    pub zero: f64,
    /// Slack for matching products and distances, and the eigenvalue cut
    /// of the embedding.
    pub matching: f64,
    /// Largest accepted relative power-sum discrepancy of the recovered
    /// model. Enforced in exact mode only.
    pub forward: f64,
    /// Node budget of the geometric search.
    pub budget: u64,
    /// Product-labeling branches tried before falling back to the
    /// geometric search.
    pub labeling_limit: u64,
}

impl Tolerances {
    /// 1e-8 for every threshold, Prony defaults for exact input in `T`.
    pub fn exact<T: Real>() -> Self {
        Tolerances {
            mode: Mode::Exact,
            prony: PronyOptions::exact::<T>(),
            zero: 1e-8,
            matching: 1e-8,
            forward: 1e-8,
            budget: SearchOptions::default().budget,
            labeling_limit: 100_000,
        }
    }

    /// Thresholds scaled by three times `noise`, the largest relative
    /// standard error of the rescaled power sums.
    pub fn empirical<T: Real>(noise: f64) -> Self {
        let n = (3.0 * noise).max(1e-8);
        Tolerances {
            mode: Mode::Empirical,
            prony: PronyOptions::empirical::<T>(noise),
            zero: n,
            matching: n,
            forward: n,
            ..Self::exact::<T>()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Largest relative discrepancy between the input power sums and those
    /// of the recovered model.
    pub power_sum: f64,
    /// `|Σ π − 1|` before normalization.
    pub weight_sum_defect: f64,
    /// `|Σ π² − a_0|` with `a_0` the weight of the zero node.
    pub zero_node_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelingMethod {
    /// One point, or two.
    Trivial,
    Products,
    Search,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelingStats {
    pub method: LabelingMethod,
    /// Branches of the product labeling.
    pub labelings_tried: u64,
    /// Labelings that produced a model.
    pub candidates: usize,
    /// Pairwise non-congruent models among the candidates.
    pub distinct_solutions: usize,
    pub search_nodes: Option<u64>,
    pub search_complete: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Singular values of the rescaled Hankel matrix, descending.
    pub hankel_singular_values: Vec<f64>,
    pub prony_residual: f64,
    pub node_scale: f64,
    /// `(weight, position)` of every recovered node, ascending.
    pub nodes: Vec<(f64, f64)>,
    pub zero_node: (f64, f64),
    /// Weights before normalization.
    pub raw_weights: Vec<f64>,
    pub labeling: LabelingStats,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// `"power-sums"` or `"deltas"`.
    pub source: String,
    /// SHA-256 of the input values as little-endian `f64`.
    pub input_sha256: String,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub k: usize,
    pub d: usize,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport<T> {
    pub recovered: MixtureModel<T>,
    pub residuals: Residuals,
    pub diagnostics: Diagnostics,
    pub provenance: Provenance,
}

/// Node count of a `k`-component mixture: one per pair plus the zero node.
pub fn node_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2 + 1
}

/// Largest relative standard error of the rescaled power sums.
pub fn relative_noise<T: Real>(p: &PowerSums<T>) -> f64 {
    let Some(se) = &p.stderr else { return 0.0 };
    let s = node_scale(&p.values);
    let mut f = T::one();
    let mut mag = T::zero();
    let mut err = T::zero();
    for (v, e) in p.values.iter().zip(se) {
        mag = mag.max(v.abs() / f);
        err = err.max(e.abs() / f);
        f *= s;
    }
    if mag > T::zero() {
        (err / mag).as_f64()
    } else {
        0.0
    }
}

/// Recovers a `k`-component mixture in `R^d` up to rigid motion.
///
/// `tolerances = None` picks [`Tolerances::exact`] for power sums without
/// standard errors and [`Tolerances::empirical`] otherwise. Errors carry
/// the stage they came from.
pub fn recover_mixture<T: Real>(
    source: &Source<T>,
    k: usize,
    d: usize,
    tolerances: Option<Tolerances>,
) -> Result<RecoveryReport<T>> {
    if k == 0 || d == 0 {
        return Err(Error::Domain(format!("need k ≥ 1 and d ≥ 1, got k = {k}, d = {d}")));
    }
    let nodes = node_count(k);
    let len = 2 * nodes;
    let (p, hash, samples, seed, kind) = match source {
        Source::PowerSums(p) => (
            p.clone(),
            hash_values(p.values.iter().map(|v| v.as_f64())),
            None,
            None,
            "power-sums",
        ),
        Source::Deltas(s) => {
            if s.form_kind != FormKind::Euclidean {
                return Err(Error::UnsupportedForm("sample recovery needs the euclidean form").at(Stage::Moments));
            }
            let m = empirical_moments::<T>(s, len - 1, d).map_err(|e| e.at(Stage::Moments))?;
            let p = moments_to_power_sums(&m).map_err(|e| e.at(Stage::Moments))?;
            (
                p,
                hash_values(s.values.iter().copied()),
                Some(s.count()),
                s.seed,
                "deltas",
            )
        }
    };
    if p.len() < len {
        return Err(Error::Order(format!(
            "{k} components need power sums of orders 0..{}, got {}",
            len - 1,
            p.len()
        ))
        .at(Stage::Moments));
    }
    let tol = tolerances.unwrap_or_else(|| match p.stderr {
        Some(_) => Tolerances::empirical::<T>(relative_noise(&p.truncated(len))),
        None => Tolerances::exact::<T>(),
    });
    let mut warnings = Vec::new();
    if k > 3 && k < d + 2 {
        warnings.push(format!(
            "k = {k} < d + 2 = {}: the distance distribution need not determine the shape",
            d + 2
        ));
    }

    let fit = prony_recover(&p.truncated(len), nodes, &tol.prony).map_err(|e| {
        let e = match e {
            // with noisy sums a low rank says nothing about coincident distances
            Error::RankDeficient { .. } if k > 1 && tol.mode == Mode::Exact => {
                let est = estimate_node_count(&p.truncated(len), &tol.prony);
                if est.nodes >= 1 && est.nodes < nodes {
                    Error::RepeatedDistances {
                        expected: nodes,
                        got: est.nodes,
                    }
                } else {
                    e
                }
            }
            e => e,
        };
        e.at(Stage::Prony)
    })?;

    let zero_at = (0..fit.nodes.len())
        .min_by(|&a, &b| fit.nodes[a].1.abs().partial_cmp(&fit.nodes[b].1.abs()).unwrap())
        .expect("at least one node");
    let (zero_weight, zero_x) = fit.nodes[zero_at];
    let span = fit.nodes.iter().fold(T::zero(), |m, n| m.max(n.1.abs()));
    if zero_x.abs() > T::lit(tol.zero) * span {
        return Err(Error::ZeroNodeMissing {
            nearest: zero_x.as_f64(),
            tol: tol.zero * span.as_f64(),
        }
        .at(Stage::ZeroNode));
    }
    let pairs: Vec<(T, T)> = fit
        .nodes
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != zero_at)
        .map(|(_, &n)| n)
        .collect();
    if let Some(&(_, x)) = pairs.iter().find(|n| !(n.1 > T::zero())) {
        return Err(Error::Domain(format!("pair node {:e} is not positive", x.as_f64())).at(Stage::Geometry));
    }

    let mut stats = LabelingStats {
        method: LabelingMethod::Trivial,
        labelings_tried: 0,
        candidates: 0,
        distinct_solutions: 0,
        search_nodes: None,
        search_complete: None,
    };
    let mut labelings = Vec::new();
    if k <= 2 {
        let mut assign = vec![vec![usize::MAX; k]; k];
        if k == 2 {
            assign[0][1] = 0;
            assign[1][0] = 0;
        }
        labelings.push(assign);
    } else {
        let products: Vec<T> = pairs.iter().map(|&(a, _)| a / T::lit(2.0)).collect();
        let mut lab = Labeler::new(&products, k, T::lit(tol.matching), tol.labeling_limit);
        lab.run();
        stats.method = LabelingMethod::Products;
        stats.labelings_tried = lab.steps;
        if !lab.overflow {
            labelings = lab.out;
        }
    }

    let mut candidates = evaluate_all(&labelings, &pairs, zero_weight, d, &tol, &p)?;
    if candidates.is_empty() && k > 2 {
        stats.method = LabelingMethod::Search;
        let xs: Vec<f64> = pairs.iter().map(|n| n.1.as_f64()).collect();
        let ms = DistanceMultiset::euclidean(xs).map_err(|e| e.at(Stage::Geometry))?;
        let opts = SearchOptions {
            tol: tol.matching.max(1e-9),
            budget: tol.budget,
        };
        let rec = reconstruct_unlabeled(&ms, d.min(k - 1), &opts).map_err(|e| e.at(Stage::Geometry))?;
        stats.search_nodes = Some(rec.nodes);
        stats.search_complete = Some(rec.complete);
        if !rec.complete {
            warnings.push(format!("geometric search stopped after {} nodes", rec.nodes));
        }
        // pairs are ascending, so multiset slots index them directly
        let labelings: Vec<Vec<Vec<usize>>> = rec.solutions.into_iter().map(|s| s.slots).collect();
        candidates = evaluate_all(&labelings, &pairs, zero_weight, d, &tol, &p)?;
    }
    if candidates.is_empty() {
        return Err(Error::Infeasible.at(if k > 2 { Stage::Geometry } else { Stage::Weights }));
    }
    stats.candidates = candidates.len();
    candidates.sort_by(|a, b| a.forward.partial_cmp(&b.forward).unwrap());
    stats.distinct_solutions = count_distinct(&candidates, tol.matching);
    if stats.distinct_solutions > 1 {
        warnings.push(format!(
            "{} non-congruent models reproduce the nodes; returning the best fit",
            stats.distinct_solutions
        ));
    }
    let best = candidates.swap_remove(0);
    if tol.mode == Mode::Exact && best.forward > T::lit(tol.forward) {
        return Err(Error::ForwardCheck {
            discrepancy: best.forward.as_f64(),
            tol: tol.forward,
        }
        .at(Stage::ForwardCheck));
    }

    Ok(RecoveryReport {
        residuals: Residuals {
            power_sum: best.forward.as_f64(),
            weight_sum_defect: best.sum_defect.as_f64(),
            zero_node_defect: best.zero_node_defect.as_f64(),
        },
        diagnostics: Diagnostics {
            hankel_singular_values: fit.singular_values.clone(),
            prony_residual: fit.residual.as_f64(),
            node_scale: fit.scale.as_f64(),
            nodes: fit.nodes.iter().map(|&(a, x)| (a.as_f64(), x.as_f64())).collect(),
            zero_node: (zero_weight.as_f64(), zero_x.as_f64()),
            raw_weights: best.raw.iter().map(|w| w.as_f64()).collect(),
            labeling: stats,
            warnings,
        },
        provenance: Provenance {
            source: kind.to_string(),
            input_sha256: hash,
            samples,
            seed,
            k,
            d,
            tolerances: tol,
        },
        recovered: best.model,
    })
}

fn hash_values(values: impl Iterator<Item = f64>) -> String {
    let mut h = Sha256::new();
    for v in values {
        h.update(v.to_le_bytes());
    }
    hex::encode(h.finalize())
}

struct Candidate<T> {
    model: MixtureModel<T>,
    raw: Vec<T>,
    forward: T,
    sum_defect: T,
    zero_node_defect: T,
}

fn evaluate_all<T: Real>(
    labelings: &[Vec<Vec<usize>>],
    pairs: &[(T, T)],
    zero_weight: T,
    d: usize,
    tol: &Tolerances,
    p: &PowerSums<T>,
) -> Result<Vec<Candidate<T>>> {
    let mut out = Vec::new();
    let mut last = None;
    for assign in labelings {
        match evaluate(assign, pairs, zero_weight, d, tol, p) {
            Ok(c) => out.push(c),
            Err(e) => last = Some(e),
        }
    }
    // a single labeling that fails is reported as such
    match (out.is_empty(), labelings.len(), last) {
        (true, 1, Some(e)) => Err(e),
        _ => Ok(out),
    }
}

fn evaluate<T: Real>(
    assign: &[Vec<usize>],
    pairs: &[(T, T)],
    zero_weight: T,
    d: usize,
    tol: &Tolerances,
    p: &PowerSums<T>,
) -> Result<Candidate<T>> {
    let k = assign.len();
    let entry = |i: usize, j: usize, f: &dyn Fn((T, T)) -> T| if i == j { T::zero() } else { f(pairs[assign[i][j]]) };
    let dist = Matrix::from_fn(k, k, |i, j| entry(i, j, &|n| n.1));
    let (raw, sum_defect, zero_node_defect) = if k == 1 {
        let w = zero_weight.sqrt();
        (vec![w], (w - T::one()).abs(), T::zero())
    } else {
        let pa = ProductAssignment {
            q: Matrix::from_fn(k, k, |i, j| entry(i, j, &|n| n.0 / T::lit(2.0))),
            zero_node_weight: zero_weight,
        };
        let w = recover_weights_with(&pa, tol.matching).map_err(|e| e.at(Stage::Weights))?;
        (w.raw, w.sum_defect, w.zero_node_defect)
    };
    let gate = T::lit(tol.matching);
    if tol.mode == Mode::Exact && (sum_defect > gate || zero_node_defect > gate) {
        return Err(Error::Inconsistent(format!(
            "weights miss the consistency gates: |Σπ − 1| = {:e}, |Σπ² − a_0| = {:e}",
            sum_defect.as_f64(),
            zero_node_defect.as_f64()
        ))
        .at(Stage::Weights));
    }
    let config = embed_labeled(&dist, d, (d, 0), tol.matching).map_err(|e| e.at(Stage::Geometry))?;
    let back = config.sq_distances();
    let scale = dist.max_abs().max(T::min_positive_value());
    let worst = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .fold(T::zero(), |m, (i, j)| m.max((back[(i, j)] - dist[(i, j)]).abs()));
    if worst > T::lit(tol.matching) * scale {
        return Err(Error::NotEmbeddable(format!(
            "labeled distances reproduced only to {:e}",
            (worst / scale).as_f64()
        ))
        .at(Stage::Geometry));
    }
    let sum = raw.iter().fold(T::zero(), |s, &w| s + w);
    let weights = raw.iter().map(|&w| w / sum).collect();
    let model = MixtureModel::euclidean(weights, config.into_points()).map_err(|e| e.at(Stage::Weights))?;
    let forward = power_sum_discrepancy(&exact_power_sums(&model, p.max_order()).values, &p.values);
    Ok(Candidate {
        model,
        raw,
        forward,
        sum_defect,
        zero_node_defect,
    })
}

/// Largest entrywise relative difference `|a_n − b_n| / max(|a_n|, |b_n|)`.
pub fn power_sum_discrepancy<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |m, (&x, &y)| {
        let s = x.abs().max(y.abs());
        if s > T::zero() {
            m.max((x - y).abs() / s)
        } else {
            m
        }
    })
}

fn count_distinct<T: Real>(candidates: &[Candidate<T>], tol: f64) -> usize {
    let mut reps: Vec<&MixtureModel<T>> = Vec::new();
    for c in candidates {
        if !reps.iter().any(|r| congruent(r, &c.model, tol)) {
            reps.push(&c.model);
        }
    }
    reps.len()
}

fn congruent<T: Real>(a: &MixtureModel<T>, b: &MixtureModel<T>, tol: f64) -> bool {
    let wt = T::lit(tol.sqrt());
    let scale = a
        .mean_sq_distances()
        .max_abs()
        .max(b.mean_sq_distances().max_abs())
        .max(T::one())
        .sqrt();
    weighted_shape_distance(a, b, wt).is_some_and(|s| s <= wt * scale)
}

fn weighted_shape_distance<T: Real>(a: &MixtureModel<T>, b: &MixtureModel<T>, wtol: T) -> Option<T> {
    let ca = PointConfig::new(a.means().to_vec()).ok()?;
    let cb = PointConfig::new(b.means().to_vec()).ok()?;
    let (wa, wb) = (a.weights(), b.weights());
    align_with(&ca, &cb, |i, j| (wa[i] - wb[j]).abs() <= wtol)
        .ok()
        .map(|al| al.rms)
}

/// Outcome of [`compare_models`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub power_sums_a: Vec<f64>,
    pub power_sums_b: Vec<f64>,
    /// `|p_n(a) − p_n(b)|` for `n = 0..=L`.
    pub discrepancy: Vec<f64>,
    /// See [`power_sum_discrepancy`].
    pub max_relative: f64,
    /// Rms distance of the means after the best rigid motion over the
    /// labelings that pair components of equal weight (within `tol`).
    /// `None` when `k` or `d` differ or no such labeling exists.
    pub shape_distance: Option<f64>,
    pub tol: f64,
    /// Both the relative power-sum discrepancy and the shape distance are
    /// within `tol`.
    pub same_shape: bool,
}

pub fn compare_models<T: Real>(a: &MixtureModel<T>, b: &MixtureModel<T>, max_order: usize, tol: f64) -> Comparison {
    let pa = exact_power_sums(a, max_order).values;
    let pb = exact_power_sums(b, max_order).values;
    let discrepancy = pa.iter().zip(&pb).map(|(&x, &y)| (x - y).abs().as_f64()).collect();
    let max_relative = power_sum_discrepancy(&pa, &pb).as_f64();
    let shape_distance = if a.k() == b.k() && a.d() == b.d() {
        weighted_shape_distance(a, b, T::lit(tol)).map(|s| s.as_f64())
    } else {
        None
    };
    Comparison {
        power_sums_a: pa.iter().map(|v| v.as_f64()).collect(),
        power_sums_b: pb.iter().map(|v| v.as_f64()).collect(),
        discrepancy,
        max_relative,
        same_shape: max_relative <= tol && shape_distance.is_some_and(|s| s <= tol),
        shape_distance,
        tol,
    }
}

/// Assigns pair nodes to point pairs from their products alone. Points are
/// labeled by decreasing weight; see the module documentation.
struct Labeler<'a, T> {
    q: &'a [T],
    k: usize,
    tol: T,
    limit: u64,
    steps: u64,
    overflow: bool,
    used: Vec<bool>,
    assign: Vec<Vec<usize>>,
    pi: Vec<T>,
    out: Vec<Vec<Vec<usize>>>,
}

impl<'a, T: Real> Labeler<'a, T> {
    fn new(q: &'a [T], k: usize, tol: T, limit: u64) -> Self {
        Labeler {
            q,
            k,
            tol,
            limit,
            steps: 0,
            overflow: false,
            used: vec![false; q.len()],
            assign: vec![vec![usize::MAX; k]; k],
            pi: vec![T::zero(); k],
            out: Vec::new(),
        }
    }

    fn close(&self, a: T, b: T) -> bool {
        (a - b).abs() <= self.tol * a.abs().max(b.abs())
    }

    fn at_most(&self, a: T, b: T) -> bool {
        a <= b * (T::one() + self.tol)
    }

    fn tick(&mut self) -> bool {
        self.steps += 1;
        if self.steps > self.limit {
            self.overflow = true;
        }
        !self.overflow
    }

    fn set(&mut self, i: usize, j: usize, m: usize) {
        self.used[m] = true;
        self.assign[i][j] = m;
        self.assign[j][i] = m;
    }

    fn unset(&mut self, m: usize) {
        self.used[m] = false;
    }

    /// Unused nodes whose product ties the largest unused one.
    fn near_max(&self) -> Vec<usize> {
        let free = || (0..self.q.len()).filter(|&m| !self.used[m]);
        let Some(top) = free().map(|m| self.q[m]).reduce(T::max) else {
            return Vec::new();
        };
        free().filter(|&m| self.close(self.q[m], top)).collect()
    }

    fn run(&mut self) {
        for m01 in self.near_max() {
            self.set(0, 1, m01);
            for m02 in self.near_max() {
                self.set(0, 2, m02);
                for m12 in 0..self.q.len() {
                    if self.used[m12] || !self.at_most(self.q[m12], self.q[m02]) || !self.tick() {
                        continue;
                    }
                    let (q01, q02, q12) = (self.q[m01], self.q[m02], self.q[m12]);
                    let p0 = (q01 * q02 / q12).sqrt();
                    let (p1, p2) = (q01 / p0, q02 / p0);
                    if self.at_most(p1, p0) && self.at_most(p2, p1) {
                        self.pi[..3].copy_from_slice(&[p0, p1, p2]);
                        self.set(1, 2, m12);
                        self.extend(3);
                        self.unset(m12);
                    }
                }
                self.unset(m02);
            }
            self.unset(m01);
        }
    }

    fn extend(&mut self, t: usize) {
        if t == self.k {
            self.out.push(self.assign.clone());
            return;
        }
        for m in self.near_max() {
            if !self.tick() {
                return;
            }
            let pt = self.q[m] / self.pi[0];
            if !self.at_most(pt, self.pi[t - 1]) {
                continue;
            }
            self.pi[t] = pt;
            self.set(0, t, m);
            self.link(t, 1);
            self.unset(m);
        }
    }

    fn link(&mut self, t: usize, i: usize) {
        if i == t {
            self.extend(t + 1);
            return;
        }
        let target = self.pi[i] * self.pi[t];
        for m in 0..self.q.len() {
            if self.used[m] || !self.close(self.q[m], target) {
                continue;
            }
            if !self.tick() {
                return;
            }
            self.set(i, t, m);
            self.link(t, i + 1);
            self.unset(m);
        }
    }
}
