//! Moment algebra for the squared distance Δ.
//!
//! For a fixed component pair `(i, j)`, `Δ/2` is noncentral chi-square with
//! `d` degrees of freedom and noncentrality `δ_ij/2`, so
//!
//! ```text
//! E[e^{tΔ}] = Σ_n (p_n / n!) tⁿ (1 − 4t)^{−(n + d/2)},
//! p_n = Σ_{i,j} π_i π_j δ_ij^n .
//! ```
//!
//! Matching coefficients of `t^p` gives a unit lower-triangular map from
//! the power sums to the raw moments:
//!
//! ```text
//! E[Δ^p] = Σ_{n≤p} C(p, n) p_n,   C(p, n) = binom(p, n) 4^{p−n} (n + d/2)^{(p−n)}
//! ```
//!
//! with `x^{(j)}` the rising factorial. Both directions are evaluated with
//! compensated summation; the coefficients grow like `4^p (d/2)_p`.

use crate::error::{Error, Result};
use crate::model::MixtureModel;
use crate::sampling::DeltaSamples;
use crate::scalar::{compensated_sum, Real};

/// Weighted power sums `p_n = Σ_{i,j} π_i π_j δ_ij^n`, `n = 0..=L`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSums<T> {
    pub values: Vec<T>,
    /// Propagated standard errors, for power sums estimated from samples.
    pub stderr: Option<Vec<T>>,
}

impl<T: Real> PowerSums<T> {
    pub fn new(values: Vec<T>) -> Self {
        PowerSums { values, stderr: None }
    }

    pub fn max_order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn truncated(&self, len: usize) -> Self {
        PowerSums {
            values: self.values[..len.min(self.values.len())].to_vec(),
            stderr: self.stderr.as_ref().map(|s| s[..len.min(s.len())].to_vec()),
        }
    }

    pub fn cast<U: Real>(&self) -> PowerSums<U> {
        let c = |v: &Vec<T>| v.iter().map(|&x| crate::model::cast_scalar(x)).collect();
        PowerSums {
            values: c(&self.values),
            stderr: self.stderr.as_ref().map(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentSource {
    Exact,
    Empirical,
}

/// Raw moments `E[Δ^0] .. E[Δ^L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector<T> {
    pub values: Vec<T>,
    /// Dimension the expansion is taken in.
    pub d: usize,
    pub source: MomentSource,
    pub stderr: Option<Vec<T>>,
}

impl<T: Real> MomentVector<T> {
    pub fn max_order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    /// Cauchy-Schwarz check `E[Δⁿ]² ≤ E[Δⁿ⁻¹] E[Δⁿ⁺¹]` (relative slack
    /// `tol`), together with nonnegativity.
    pub fn is_log_convex(&self, tol: T) -> bool {
        let v = &self.values;
        v.iter().all(|&x| x >= T::zero()) && v.windows(3).all(|w| w[1] * w[1] <= w[0] * w[2] * (T::one() + tol))
    }
}

/// `C(p, n)` for `0 ≤ n ≤ p ≤ max_order` as a lower-triangular table.
fn expansion_coefficients<T: Real>(max_order: usize, d: usize) -> Vec<Vec<T>> {
    let half_d = T::from_count(d) / T::lit(2.0);
    let four = T::lit(4.0);
    let mut binom: Vec<Vec<T>> = Vec::with_capacity(max_order + 1);
    for p in 0..=max_order {
        let mut row = vec![T::one(); p + 1];
        for n in 1..p {
            row[n] = binom[p - 1][n - 1] + binom[p - 1][n];
        }
        binom.push(row);
    }
    (0..=max_order)
        .map(|p| {
            (0..=p)
                .map(|n| {
                    let j = p - n;
                    let alpha = T::from_count(n) + half_d;
                    let mut rising = T::one();
                    for l in 0..j {
                        rising *= four * (alpha + T::from_count(l));
                    }
                    binom[p][n] * rising
                })
                .collect()
        })
        .collect()
}

/// Inverse of the unit lower-triangular coefficient table.
fn inverse_coefficients<T: Real>(c: &[Vec<T>]) -> Vec<Vec<T>> {
    let l = c.len();
    let mut inv: Vec<Vec<T>> = Vec::with_capacity(l);
    for p in 0..l {
        let mut row = vec![T::zero(); p + 1];
        row[p] = T::one();
        for q in 0..p {
            row[q] = -compensated_sum((q..p).map(|n| c[p][n] * inv[n][q]));
        }
        inv.push(row);
    }
    inv
}

/// Power sums by direct double summation over components.
pub fn exact_power_sums<T: Real>(model: &MixtureModel<T>, max_order: usize) -> PowerSums<T> {
    let k = model.k();
    let w = model.weights();
    let delta = model.mean_sq_distances();
    let mut values = Vec::with_capacity(max_order + 1);
    // diagonal terms only contribute to p_0 (0^0 = 1)
    let diagonal = compensated_sum(w.iter().map(|&x| x * x));
    let mut pair_weight = Vec::new();
    let mut pair_power = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            pair_weight.push(T::lit(2.0) * w[i] * w[j]);
            pair_power.push(T::one());
        }
    }
    let pair_delta: Vec<T> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .map(|(i, j)| delta[(i, j)])
        .collect();
    for n in 0..=max_order {
        let off = compensated_sum(pair_weight.iter().zip(&pair_power).map(|(&a, &x)| a * x));
        values.push(if n == 0 { diagonal + off } else { off });
        for (pw, &dl) in pair_power.iter_mut().zip(&pair_delta) {
            *pw *= dl;
        }
    }
    PowerSums::new(values)
}

/// Forward triangular map: power sums to raw moments in dimension `d`.
pub fn power_sums_to_moments<T: Real>(p: &PowerSums<T>, d: usize) -> MomentVector<T> {
    let c = expansion_coefficients::<T>(p.max_order(), d);
    let values = (0..p.len())
        .map(|o| compensated_sum((0..=o).map(|n| c[o][n] * p.values[n])))
        .collect();
    MomentVector {
        values,
        d,
        source: MomentSource::Exact,
        stderr: None,
    }
}

/// Raw moments of Δ for a euclidean mixture.
pub fn exact_moments<T: Real>(model: &MixtureModel<T>, max_order: usize) -> Result<MomentVector<T>> {
    if !model.form().is_euclidean() {
        return Err(Error::UnsupportedForm(
            "moment expansion is only valid for the euclidean form",
        ));
    }
    let mut m = power_sums_to_moments(&exact_power_sums(model, max_order), model.d());
    m.values[0] = T::one();
    Ok(m)
}

/// Sample moments with per-order standard errors (sample standard
/// deviation of `Δ^p` over `√N`). Means and variances use Welford's
/// recurrence, which is exact on constant input.
pub fn empirical_moments<T: Real>(samples: &DeltaSamples, max_order: usize, d: usize) -> Result<MomentVector<T>> {
    let n = samples.count();
    if n < 2 {
        return Err(Error::Empty { needed: 2, got: n });
    }
    let orders = max_order + 1;
    let mut mean = vec![T::zero(); orders];
    let mut m2 = vec![T::zero(); orders];
    for (idx, &v) in samples.values.iter().enumerate() {
        let count = T::from_count(idx + 1);
        let x = T::lit(v);
        let mut pow = T::one();
        for p in 1..orders {
            pow *= x;
            let delta = pow - mean[p];
            mean[p] += delta / count;
            m2[p] += delta * (pow - mean[p]);
        }
    }
    mean[0] = T::one();
    let nn = T::from_count(n);
    let stderr = m2
        .iter()
        .map(|&s| (s / (nn - T::one())).max(T::zero()).sqrt() / nn.sqrt())
        .collect();
    Ok(MomentVector {
        values: mean,
        d,
        source: MomentSource::Empirical,
        stderr: Some(stderr),
    })
}

/// Inverse triangular map: raw moments to power sums. Standard errors, when
/// present, are propagated through the linear map assuming independent
/// entries.
pub fn moments_to_power_sums<T: Real>(m: &MomentVector<T>) -> Result<PowerSums<T>> {
    if m.values.is_empty() {
        return Err(Error::Order("moment vector is empty".into()));
    }
    if let Some(se) = &m.stderr {
        if se.len() != m.values.len() {
            return Err(Error::Order(format!(
                "{} moments but {} standard errors",
                m.values.len(),
                se.len()
            )));
        }
    }
    let c = expansion_coefficients::<T>(m.max_order(), m.d);
    let mut p: Vec<T> = Vec::with_capacity(m.values.len());
    for o in 0..m.values.len() {
        let lower = compensated_sum((0..o).map(|n| c[o][n] * p[n]));
        p.push(m.values[o] - lower);
    }
    let stderr = m.stderr.as_ref().map(|se| {
        let inv = inverse_coefficients(&c);
        (0..se.len())
            .map(|o| {
                compensated_sum((0..=o).map(|q| {
                    let t = inv[o][q] * se[q];
                    t * t
                }))
                .sqrt()
            })
            .collect()
    });
    Ok(PowerSums { values: p, stderr })
}
