//! Mixture weights from their pairwise products.
//!
//! For `k ≥ 3` the system `log π_i + log π_j = log q_ij` over all pairs is
//! solved in least squares. Its normal equations `(k−2) y_i + Σ_j y_j = s_i`,
//! with `s_i = Σ_{j≠i} log q_ij`, have the closed-form solution
//! `y_i = (s_i − S / (2(k−1))) / (k−2)` where `S = Σ_i s_i`. For `k = 2`
//! the pair is the root pair of `t² − t + q`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{compensated_sum, Real};

/// Labeled pairwise products `q_ij = π_i π_j` and the separately recovered
/// `Σ π_i²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductAssignment<T> {
    /// Symmetric `k × k`; the diagonal is ignored.
    pub q: Matrix<T>,
    pub zero_node_weight: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightRecovery<T> {
    /// Solution of the product equations before normalization.
    pub raw: Vec<T>,
    /// `raw / Σ raw`.
    pub weights: Vec<T>,
    pub sum: T,
    /// `|Σ raw − 1|`.
    pub sum_defect: T,
    /// `|Σ raw² − zero_node_weight|`.
    pub zero_node_defect: T,
}

/// Default slack for `q_12 ≤ ¼` when `k = 2`.
pub const DEFAULT_TOL: f64 = 1e-8;

pub fn recover_weights<T: Real>(pa: &ProductAssignment<T>) -> Result<WeightRecovery<T>> {
    recover_weights_with(pa, DEFAULT_TOL)
}

/// [`recover_weights`] with an explicit slack: for `k = 2`, products up to
/// `¼ + tol` are accepted and clamped to `¼`.
pub fn recover_weights_with<T: Real>(pa: &ProductAssignment<T>, tol: f64) -> Result<WeightRecovery<T>> {
    let q = &pa.q;
    let k = q.rows();
    if q.cols() != k {
        return Err(Error::Shape(format!("{k}×{} product matrix", q.cols())));
    }
    if k < 2 {
        return Err(Error::Domain(format!("need at least 2 components, got {k}")));
    }
    for i in 0..k {
        for j in 0..k {
            if i != j && !(q[(i, j)] > T::zero() && q[(i, j)].is_finite()) {
                return Err(Error::Domain(format!(
                    "product q[{i}][{j}] = {:e} is not positive",
                    q[(i, j)].as_f64()
                )));
            }
        }
    }
    let raw = if k == 2 {
        pair(q[(0, 1)], tol)?
    } else {
        log_least_squares(q)
    };
    let sum = compensated_sum(raw.iter().copied());
    let squares = compensated_sum(raw.iter().map(|&w| w * w));
    Ok(WeightRecovery {
        weights: raw.iter().map(|&w| w / sum).collect(),
        sum_defect: (sum - T::one()).abs(),
        zero_node_defect: (squares - pa.zero_node_weight).abs(),
        sum,
        raw,
    })
}

fn pair<T: Real>(q: T, tol: f64) -> Result<Vec<T>> {
    let quarter = T::lit(0.25);
    if q > quarter + T::lit(tol) {
        return Err(Error::Inconsistent(format!(
            "pair product {:e} exceeds 1/4",
            q.as_f64()
        )));
    }
    let r = (quarter - q).max(T::zero()).sqrt();
    let half = T::lit(0.5);
    Ok(vec![half - r, half + r])
}

fn log_least_squares<T: Real>(q: &Matrix<T>) -> Vec<T> {
    let k = q.rows();
    let s: Vec<T> = (0..k)
        .map(|i| compensated_sum((0..k).filter(|&j| j != i).map(|j| q[(i, j)].ln())))
        .collect();
    let total = compensated_sum(s.iter().copied());
    let shift = total / T::from_count(2 * (k - 1));
    let denom = T::from_count(k - 2);
    s.iter().map(|&si| ((si - shift) / denom).exp()).collect()
}

/// Outer-product assignment of a weight vector.
pub fn products_of<T: Real>(weights: &[T]) -> ProductAssignment<T> {
    let k = weights.len();
    ProductAssignment {
        q: Matrix::from_fn(k, k, |i, j| if i == j { T::zero() } else { weights[i] * weights[j] }),
        zero_node_weight: compensated_sum(weights.iter().map(|&w| w * w)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assignment(k: usize, entries: &[(usize, usize, f64)], zero: f64) -> ProductAssignment<f64> {
        let mut q = Matrix::zeros(k, k);
        for &(i, j, v) in entries {
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
        ProductAssignment {
            q,
            zero_node_weight: zero,
        }
    }

    #[test]
    fn three_weights_match_closed_form() {
        let pa = assignment(3, &[(0, 1, 0.06), (0, 2, 0.10), (1, 2, 0.15)], 0.38);
        let r = recover_weights(&pa).unwrap();
        // π_i = √(q_ij q_il / q_jl)
        let oracle = [
            (0.06f64 * 0.10 / 0.15).sqrt(),
            (0.06f64 * 0.15 / 0.10).sqrt(),
            (0.10f64 * 0.15 / 0.06).sqrt(),
        ];
        for (w, o) in r.raw.iter().zip(oracle) {
            assert!((w - o).abs() < 1e-14);
        }
        for (w, e) in r.weights.iter().zip([0.2, 0.3, 0.5]) {
            assert!((w - e).abs() < 1e-14);
        }
        assert!(r.sum_defect < 1e-14);
        assert!(r.zero_node_defect < 1e-14);
    }

    #[test]
    fn equal_pair_at_boundary() {
        let r = recover_weights(&assignment(2, &[(0, 1, 0.25)], 0.5)).unwrap();
        assert_eq!(r.raw, vec![0.5, 0.5]);
    }

    #[test]
    fn pair_solves_quadratic() {
        let r = recover_weights(&assignment(2, &[(0, 1, 0.21)], 0.58)).unwrap();
        // roots of t² − t + 0.21
        assert!((r.raw[0] - 0.3).abs() < 1e-14);
        assert!((r.raw[1] - 0.7).abs() < 1e-14);
        assert!(r.zero_node_defect < 1e-14);
    }

    #[test]
    fn pair_product_above_quarter_is_inconsistent() {
        let err = recover_weights(&assignment(2, &[(0, 1, 0.3)], 0.4)).unwrap_err();
        assert!(matches!(err, Error::Inconsistent(_)));
        // within slack: clamped to the equal split
        let r = recover_weights(&assignment(2, &[(0, 1, 0.25 + 1e-10)], 0.5)).unwrap();
        assert_eq!(r.raw, vec![0.5, 0.5]);
    }

    #[test]
    fn nonpositive_product_is_a_domain_error() {
        let err = recover_weights(&assignment(3, &[(0, 1, 0.1), (0, 2, 0.0), (1, 2, 0.2)], 0.3)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let err = recover_weights(&assignment(1, &[], 1.0)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn raw_weights_keep_the_sum_defect() {
        // products of (0.2, 0.3, 0.5) scaled by 1.01²: raw weights scale by 1.01
        let w = [0.2 * 1.01, 0.3 * 1.01, 0.5 * 1.01];
        let r = recover_weights(&products_of::<f64>(&w)).unwrap();
        assert!((r.sum - 1.01).abs() < 1e-13);
        assert!((r.sum_defect - 0.01).abs() < 1e-13);
        assert!((r.weights[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn noisy_products_are_averaged() {
        let mut pa = products_of::<f64>(&[0.1, 0.2, 0.3, 0.4]);
        pa.q[(0, 1)] *= 1.0 + 1e-3;
        pa.q[(1, 0)] *= 1.0 + 1e-3;
        let r = recover_weights(&pa).unwrap();
        for (w, e) in r.weights.iter().zip([0.1, 0.2, 0.3, 0.4]) {
            assert!((w - e).abs() < 1e-3 * e);
        }
    }
}
