//! Recovery of weighted nodes from power sums.
//!
//! Given `p_n = Σ_m a_m x_mⁿ` for `n = 0..2K−1` with distinct nodes and
//! nonzero weights, the monic polynomial `F(t) = Π (t − x_m) = t^K − Σ c_r t^{K−r}`
//! satisfies the linear recurrence `p_{K+j} = Σ_r c_r p_{K−r+j}`. Its
//! coefficients solve a `K × K` Hankel system `H[j][r] = p_{j+r}`; the nodes
//! are the roots of `F` and the weights solve the Vandermonde system
//! `Σ_m a_m x_mⁿ = p_n`, `n < K`.
//!
//! [`prony_recover`] rescales the nodes by `s = p_1 / p_0` before solving
//! (`p_n ↦ p_n / sⁿ`) and undoes the scaling afterwards. Residuals are
//! reported on the rescaled sums, relative to their largest magnitude.

use crate::error::{Error, Result};
use crate::linalg::{hessenberg_eigenvalues, qr_solve, singular_values, Matrix};
use crate::moments::PowerSums;
use crate::scalar::{compensated_sum, Real};

/// Thresholds for the Prony step. All are relative quantities.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PronyOptions {
    /// Singular values below `rank_tol · σ_max` do not count toward the
    /// numerical rank in [`estimate_node_count`].
    pub rank_tol: f64,
    /// [`hankel_solve`] rejects a Hankel matrix with `σ_min < reject_tol · σ_max`.
    pub reject_tol: f64,
    /// A root is real when `|Im| ≤ imag_tol · (1 + |Re|)`.
    pub imag_tol: f64,
    /// Roots closer than `cluster_tol · max|root|` are merged.
    pub cluster_tol: f64,
    /// Reject negative recovered weights.
    pub require_positive_weights: bool,
}

impl PronyOptions {
    /// Defaults for exact input in scalar type `T`. The double-precision
    /// values are rank 1e-8, imaginary 1e-7, clustering 1e-6; the rank
    /// threshold shrinks with `√ε` for wider types.
    pub fn exact<T: Real>() -> Self {
        let ratio = T::epsilon_ratio();
        let widen = ratio.sqrt().max(1.0);
        PronyOptions {
            rank_tol: 1e-8 * ratio.sqrt(),
            reject_tol: 1e4 * T::epsilon().as_f64(),
            imag_tol: 1e-7 * widen,
            cluster_tol: 1e-6 * widen,
            require_positive_weights: true,
        }
    }

    /// Defaults for power sums estimated from samples, where `noise` is the
    /// largest relative standard error of the rescaled power sums.
    pub fn empirical<T: Real>(noise: f64) -> Self {
        let base = Self::exact::<T>();
        let n = 3.0 * noise;
        PronyOptions {
            rank_tol: base.rank_tol.max(n),
            reject_tol: base.reject_tol.max(n * n),
            imag_tol: 1e-3_f64.max(n),
            cluster_tol: base.cluster_tol.max(n),
            require_positive_weights: true,
        }
    }
}

/// Monic characteristic polynomial `F(t) = t^K − Σ_{r=1..K} c_r t^{K−r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly<T> {
    /// `c_1 .. c_K`.
    pub coeffs: Vec<T>,
}

impl<T: Real> CharPoly<T> {
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `(F(t), F'(t))` by Horner's rule.
    pub fn eval_with_derivative(&self, t: T) -> (T, T) {
        let mut f = T::one();
        let mut df = T::zero();
        for &c in &self.coeffs {
            df = df * t + f;
            f = f * t - c;
        }
        (f, df)
    }

    pub fn eval(&self, t: T) -> T {
        self.eval_with_derivative(t).0
    }

    /// Companion matrix, upper Hessenberg with the coefficients in row 0.
    pub fn companion(&self) -> Matrix<T> {
        let k = self.degree();
        Matrix::from_fn(k, k, |i, j| {
            if i == 0 {
                self.coeffs[j]
            } else if i == j + 1 {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct HankelSolution<T> {
    pub poly: CharPoly<T>,
    /// Singular values of the Hankel matrix, descending.
    pub singular_values: Vec<T>,
    /// Largest recurrence mismatch over every available order, relative to
    /// `max |p_n|`.
    pub residual: T,
}

/// Solves the Hankel system for the characteristic polynomial of `K` nodes.
pub fn hankel_solve<T: Real>(p: &[T], nodes: usize, opts: &PronyOptions) -> Result<HankelSolution<T>> {
    let k = nodes;
    if k == 0 {
        return Err(Error::Order("node count must be positive".into()));
    }
    if p.len() < 2 * k {
        return Err(Error::Order(format!(
            "{k} nodes need power sums of orders 0..{}, got {}",
            2 * k - 1,
            p.len()
        )));
    }
    let h = Matrix::from_fn(k, k, |i, j| p[i + j]);
    let sv = singular_values(&h);
    let smax = sv[0];
    let smin = sv[k - 1];
    let profile = || sv.iter().map(|s| s.as_f64()).collect::<Vec<_>>();
    if smax == T::zero() || smin <= T::lit(opts.reject_tol) * smax {
        return Err(Error::RankDeficient {
            singular_values: profile(),
        });
    }
    let rhs: Vec<T> = (0..k).map(|i| p[k + i]).collect();
    let x = qr_solve(&h, &rhs).ok_or_else(|| Error::RankDeficient {
        singular_values: profile(),
    })?;
    // x = (c_K, ..., c_1)
    let coeffs: Vec<T> = (1..=k).map(|r| x[k - r]).collect();
    let norm = p.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let residual = (0..=p.len() - k - 1)
        .map(|j| {
            let pred = compensated_sum((1..=k).map(|r| coeffs[r - 1] * p[k - r + j]));
            (p[k + j] - pred).abs()
        })
        .fold(T::zero(), T::max)
        / if norm > T::zero() { norm } else { T::one() };
    Ok(HankelSolution {
        poly: CharPoly { coeffs },
        singular_values: sv,
        residual,
    })
}

/// Real roots of a characteristic polynomial, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Roots<T> {
    pub values: Vec<T>,
    /// Set when near-coincident roots were merged.
    pub merged: bool,
}

const NEWTON_STEPS: usize = 30;

/// Roots via companion-matrix eigenvalues, each polished by Newton steps
/// that are kept only while they reduce `|F|`.
pub fn poly_roots<T: Real>(f: &CharPoly<T>, opts: &PronyOptions) -> Result<Roots<T>> {
    let k = f.degree();
    if k == 0 {
        return Err(Error::Order("polynomial degree must be at least 1".into()));
    }
    let raw: Vec<(T, T)> = if k == 1 {
        vec![(f.coeffs[0], T::zero())]
    } else {
        hessenberg_eigenvalues(&f.companion()).ok_or(Error::NoConvergence("companion eigenvalue iteration"))?
    };
    let imag_tol = T::lit(opts.imag_tol);
    let mut roots = Vec::with_capacity(k);
    for (re, im) in raw {
        if im.abs() > imag_tol * (T::one() + re.abs()) {
            return Err(Error::NonrealRoots {
                re: re.as_f64(),
                im: im.as_f64(),
            });
        }
        roots.push(polish(f, re));
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let largest = roots.iter().fold(T::zero(), |m, r| m.max(r.abs()));
    let gap = T::lit(opts.cluster_tol) * if largest > T::zero() { largest } else { T::one() };
    let mut merged = false;
    let mut values: Vec<T> = Vec::with_capacity(k);
    let mut cluster: Vec<T> = Vec::new();
    for r in roots {
        if let Some(&last) = cluster.last() {
            if r - last < gap {
                cluster.push(r);
                merged = true;
                continue;
            }
            values.push(mean(&cluster));
            cluster.clear();
        }
        cluster.push(r);
    }
    if !cluster.is_empty() {
        values.push(mean(&cluster));
    }
    Ok(Roots { values, merged })
}

fn mean<T: Real>(xs: &[T]) -> T {
    compensated_sum(xs.iter().copied()) / T::from_count(xs.len())
}

fn polish<T: Real>(f: &CharPoly<T>, x0: T) -> T {
    let mut x = x0;
    let (mut fx, mut dfx) = f.eval_with_derivative(x);
    for _ in 0..NEWTON_STEPS {
        if fx == T::zero() || dfx == T::zero() {
            break;
        }
        let next = x - fx / dfx;
        let (fn_, dfn) = f.eval_with_derivative(next);
        if !(fn_.abs() < fx.abs()) {
            break;
        }
        x = next;
        fx = fn_;
        dfx = dfn;
    }
    x
}

/// Recovered weighted nodes `(a_m, x_m)`, ascending in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet<T> {
    pub nodes: Vec<(T, T)>,
    /// Node rescaling factor used while solving.
    pub scale: T,
    /// Largest mismatch when regenerating the input power sums from the
    /// nodes, on the rescaled sums and relative to their largest magnitude.
    pub residual: T,
    /// Hankel singular values of the rescaled problem, descending.
    pub singular_values: Vec<f64>,
    /// Near-coincident roots were merged.
    pub merged: bool,
}

impl<T: Real> NodeSet<T> {
    pub fn weights(&self) -> Vec<T> {
        self.nodes.iter().map(|n| n.0).collect()
    }

    pub fn positions(&self) -> Vec<T> {
        self.nodes.iter().map(|n| n.1).collect()
    }

    /// `Σ_m a_m x_mⁿ` for `n = 0..len`.
    pub fn power_sums(&self, len: usize) -> Vec<T> {
        regenerate(&self.nodes, len)
    }
}

fn regenerate<T: Real>(nodes: &[(T, T)], len: usize) -> Vec<T> {
    let mut pows: Vec<T> = vec![T::one(); nodes.len()];
    (0..len)
        .map(|_| {
            let v = compensated_sum(nodes.iter().zip(&pows).map(|(&(a, _), &xp)| a * xp));
            for (xp, &(_, x)) in pows.iter_mut().zip(nodes) {
                *xp *= x;
            }
            v
        })
        .collect()
}

fn relative_residual<T: Real>(nodes: &[(T, T)], p: &[T]) -> T {
    let regen = regenerate(nodes, p.len());
    let norm = p.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let worst = regen.iter().zip(p).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
    worst / if norm > T::zero() { norm } else { T::one() }
}

/// Weights for the given nodes from the Vandermonde system
/// `Σ_i a_i x_iᵐ = p_m`, `m < K`.
pub fn vandermonde_weights<T: Real>(roots: &[T], p: &[T]) -> Result<NodeSet<T>> {
    let k = roots.len();
    if k == 0 {
        return Err(Error::Order("no nodes".into()));
    }
    if p.len() < k {
        return Err(Error::Order(format!("{k} nodes need {k} power sums, got {}", p.len())));
    }
    let mut sorted = roots.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let largest = sorted.iter().fold(T::zero(), |m, r| m.max(r.abs()));
    let tiny = T::epsilon() * T::lit(4.0) * if largest > T::zero() { largest } else { T::one() };
    for w in sorted.windows(2) {
        if w[1] - w[0] <= tiny {
            return Err(Error::VandermondeSingular(w[0].as_f64(), w[1].as_f64()));
        }
    }
    let xi = Matrix::from_fn(k, k, |m, i| sorted[i].powi(m as i32));
    let a =
        qr_solve(&xi, &p[..k]).ok_or_else(|| Error::VandermondeSingular(sorted[0].as_f64(), sorted[k - 1].as_f64()))?;
    let nodes: Vec<(T, T)> = a.into_iter().zip(sorted).collect();
    let residual = relative_residual(&nodes, p);
    Ok(NodeSet {
        nodes,
        scale: T::one(),
        residual,
        singular_values: Vec::new(),
        merged: false,
    })
}

/// Rescaling factor `s = |p_1 / p_0|`, falling back to `√|p_2 / p_0|` when
/// the first sum cancels (indefinite forms) and to 1 when both vanish.
pub fn node_scale<T: Real>(p: &[T]) -> T {
    let p0 = p.first().copied().unwrap_or(T::zero());
    if p0 == T::zero() || p.len() < 2 {
        return T::one();
    }
    let s1 = (p[1] / p0).abs();
    let s2 = if p.len() > 2 {
        (p[2] / p0).abs().sqrt()
    } else {
        T::zero()
    };
    let s = if s1 >= T::lit(1e-3) * s2 { s1 } else { s2 };
    if s > T::zero() && s.is_finite() {
        s
    } else {
        T::one()
    }
}

fn rescaled<T: Real>(p: &[T], s: T) -> Vec<T> {
    let mut f = T::one();
    p.iter()
        .map(|&v| {
            let out = v / f;
            f *= s;
            out
        })
        .collect()
}

/// Full node recovery: rescale, Hankel solve, root, Vandermonde solve,
/// unscale.
pub fn prony_recover<T: Real>(p: &PowerSums<T>, nodes: usize, opts: &PronyOptions) -> Result<NodeSet<T>> {
    if nodes == 0 {
        return Err(Error::Order("node count must be positive".into()));
    }
    if p.len() < 2 * nodes {
        return Err(Error::Order(format!(
            "{nodes} nodes need power sums of orders 0..{}, got {}",
            2 * nodes - 1,
            p.len()
        )));
    }
    let s = node_scale(&p.values);
    let q = rescaled(&p.values, s);
    let hankel = hankel_solve(&q, nodes, opts)?;
    let roots = poly_roots(&hankel.poly, opts)?;
    let mut fit = vandermonde_weights(&roots.values, &q)?;
    if opts.require_positive_weights {
        if let Some(&(a, x)) = fit.nodes.iter().find(|(a, _)| *a < T::zero()) {
            return Err(Error::NegativeWeight {
                weight: a.as_f64(),
                node: (x * s).as_f64(),
            });
        }
    }
    for node in &mut fit.nodes {
        node.1 *= s;
    }
    fit.scale = s;
    fit.merged = roots.merged;
    fit.singular_values = hankel.singular_values.iter().map(|v| v.as_f64()).collect();
    Ok(fit)
}

/// Numerical rank of the largest square Hankel matrix the sums allow.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeCountEstimate {
    pub nodes: usize,
    /// Singular values of the rescaled Hankel matrix, descending.
    pub singular_values: Vec<f64>,
    pub scale: f64,
}

pub fn estimate_node_count<T: Real>(p: &PowerSums<T>, opts: &PronyOptions) -> NodeCountEstimate {
    let n = p.len().div_ceil(2);
    if n == 0 {
        return NodeCountEstimate {
            nodes: 0,
            singular_values: Vec::new(),
            scale: 1.0,
        };
    }
    let s = node_scale(&p.values);
    let q = rescaled(&p.values, s);
    let h = Matrix::from_fn(n, n, |i, j| q[i + j]);
    let sv = singular_values(&h);
    let cut = sv[0] * T::lit(opts.rank_tol);
    let nodes = if sv[0] == T::zero() {
        0
    } else {
        sv.iter().filter(|&&v| v > cut).count()
    };
    NodeCountEstimate {
        nodes,
        singular_values: sv.iter().map(|v| v.as_f64()).collect(),
        scale: s.as_f64(),
    }
}
