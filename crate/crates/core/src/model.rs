//! Mixture models and the bilinear forms that define "squared distance".

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::scalar::{compensated_sum, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormKind {
    Euclidean,
    Diagonal,
    Matrix,
}

impl FormKind {
    pub fn name(self) -> &'static str {
        match self {
            FormKind::Euclidean => "euclidean",
            FormKind::Diagonal => "diagonal",
            FormKind::Matrix => "matrix",
        }
    }
}

/// Non-degenerate symmetric bilinear form `B(w, w)` used as squared distance.
#[derive(Debug, Clone, PartialEq)]
pub enum DistanceForm<T> {
    Euclidean,
    /// `Σ ε_l w_l²` with every `ε_l` equal to ±1.
    Diagonal(Vec<i8>),
    /// `wᵀ M w` with `M` symmetric and non-degenerate.
    Matrix(Matrix<T>),
}

impl<T: Real> DistanceForm<T> {
    pub fn diagonal(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidForm("empty sign vector".into()));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidForm(format!("sign {bad} is not ±1")));
        }
        Ok(DistanceForm::Diagonal(signs))
    }

    pub fn matrix(m: Matrix<T>) -> Result<Self> {
        if m.rows() == 0 || m.rows() != m.cols() {
            return Err(Error::InvalidForm("matrix must be square and non-empty".into()));
        }
        let scale = m.max_abs().max(T::one());
        if !m.is_symmetric(T::lit(1e-12) * scale) {
            return Err(Error::InvalidForm("matrix is not symmetric".into()));
        }
        let (values, _) = symmetric_eigen(&m);
        let largest = values.iter().fold(T::zero(), |a, v| a.max(v.abs()));
        let smallest = values.iter().fold(T::infinity(), |a, v| a.min(v.abs()));
        if largest == T::zero() || smallest < T::lit(1e-10) * largest {
            return Err(Error::InvalidForm(format!(
                "matrix is degenerate (|λ|min = {:e}, |λ|max = {:e})",
                smallest.as_f64(),
                largest.as_f64()
            )));
        }
        Ok(DistanceForm::Matrix(m))
    }

    pub fn kind(&self) -> FormKind {
        match self {
            DistanceForm::Euclidean => FormKind::Euclidean,
            DistanceForm::Diagonal(_) => FormKind::Diagonal,
            DistanceForm::Matrix(_) => FormKind::Matrix,
        }
    }

    /// Intrinsic dimension, if the form fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            DistanceForm::Euclidean => None,
            DistanceForm::Diagonal(s) => Some(s.len()),
            DistanceForm::Matrix(m) => Some(m.rows()),
        }
    }

    /// Euclidean, or a diagonal form with every sign positive.
    pub fn is_euclidean(&self) -> bool {
        match self {
            DistanceForm::Euclidean => true,
            DistanceForm::Diagonal(s) => s.iter().all(|&e| e == 1),
            DistanceForm::Matrix(_) => false,
        }
    }

    /// Maps the euclidean form to the all-positive diagonal form in `d`
    /// dimensions; other forms are returned unchanged.
    pub fn canonical(&self, d: usize) -> Self {
        match self {
            DistanceForm::Euclidean => DistanceForm::Diagonal(vec![1; d]),
            other => other.clone(),
        }
    }

    /// Counts of positive and negative eigenvalues.
    pub fn signature(&self, d: usize) -> (usize, usize) {
        match self {
            DistanceForm::Euclidean => (d, 0),
            DistanceForm::Diagonal(s) => {
                let pos = s.iter().filter(|&&e| e > 0).count();
                (pos, s.len() - pos)
            }
            DistanceForm::Matrix(m) => {
                let (values, _) = symmetric_eigen(m);
                let pos = values.iter().filter(|v| **v > T::zero()).count();
                (pos, values.len() - pos)
            }
        }
    }

    /// `B(w, w)`.
    pub fn quadratic(&self, w: &[T]) -> T {
        match self {
            DistanceForm::Euclidean => compensated_sum(w.iter().map(|&x| x * x)),
            DistanceForm::Diagonal(signs) => {
                compensated_sum(w.iter().zip(signs).map(|(&x, &s)| if s > 0 { x * x } else { -(x * x) }))
            }
            DistanceForm::Matrix(m) => compensated_sum(
                (0..w.len())
                    .flat_map(|i| (0..w.len()).map(move |j| (i, j)))
                    .map(|(i, j)| w[i] * m[(i, j)] * w[j]),
            ),
        }
    }

    pub fn cast<U: Real>(&self) -> DistanceForm<U> {
        match self {
            DistanceForm::Euclidean => DistanceForm::Euclidean,
            DistanceForm::Diagonal(s) => DistanceForm::Diagonal(s.clone()),
            DistanceForm::Matrix(m) => {
                DistanceForm::Matrix(Matrix::from_fn(m.rows(), m.cols(), |i, j| cast_scalar(m[(i, j)])))
            }
        }
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        match self.dim() {
            Some(fd) if fd != d => Err(Error::Dimension { expected: fd, got: d }),
            _ => Ok(()),
        }
    }
}

pub(crate) fn cast_scalar<T: Real, U: Real>(x: T) -> U {
    U::from(x).unwrap_or_else(|| U::lit(x.as_f64()))
}

/// Squared distance `B(u − v, u − v)` under `form`.
pub fn sq_distance<T: Real>(form: &DistanceForm<T>, u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            got: v.len(),
        });
    }
    form.check_dim(u.len())?;
    let w: Vec<T> = u.iter().zip(v).map(|(&a, &b)| a - b).collect();
    Ok(form.quadratic(&w))
}

/// Mixture of `k` unit-covariance Gaussians in `d` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel<T> {
    weights: Vec<T>,
    means: Vec<Vec<T>>,
    form: DistanceForm<T>,
}

impl<T: Real> MixtureModel<T> {
    pub fn new(weights: Vec<T>, means: Vec<Vec<T>>, form: DistanceForm<T>) -> Result<Self> {
        let k = weights.len();
        if k == 0 {
            return Err(Error::InvalidModel("at least one component required".into()));
        }
        if means.len() != k {
            return Err(Error::InvalidModel(format!("{k} weights but {} means", means.len())));
        }
        let d = means[0].len();
        if d == 0 {
            return Err(Error::InvalidModel("dimension must be positive".into()));
        }
        if let Some(row) = means.iter().find(|m| m.len() != d) {
            return Err(Error::Dimension {
                expected: d,
                got: row.len(),
            });
        }
        if means.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidModel("non-finite mean coordinate".into()));
        }
        form.check_dim(d)?;
        if let Some(w) = weights.iter().find(|w| !(**w > T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidModel(format!("weight {:e} is not positive", w.as_f64())));
        }
        let total = compensated_sum(weights.iter().copied());
        let tol = T::lit(1e-12).max(T::epsilon() * T::from_count(8 * k));
        if (total - T::one()).abs() > tol {
            return Err(Error::InvalidModel(format!(
                "weights sum to {:.17e}, not 1",
                total.as_f64()
            )));
        }
        Ok(MixtureModel { weights, means, form })
    }

    pub fn equal_weights(means: Vec<Vec<T>>, form: DistanceForm<T>) -> Result<Self> {
        let k = means.len().max(1);
        let w = T::one() / T::from_count(k);
        Self::new(vec![w; means.len()], means, form)
    }

    pub fn euclidean(weights: Vec<T>, means: Vec<Vec<T>>) -> Result<Self> {
        Self::new(weights, means, DistanceForm::Euclidean)
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn d(&self) -> usize {
        self.means[0].len()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn means(&self) -> &[Vec<T>] {
        &self.means
    }

    pub fn form(&self) -> &DistanceForm<T> {
        &self.form
    }

    /// Squared inter-mean distances `δ_ij = B(μ_i − μ_j, μ_i − μ_j)`.
    pub fn mean_sq_distances(&self) -> Matrix<T> {
        let k = self.k();
        let mut m = Matrix::zeros(k, k);
        for i in 0..k {
            for j in i + 1..k {
                let w: Vec<T> = self.means[i].iter().zip(&self.means[j]).map(|(&a, &b)| a - b).collect();
                let v = self.form.quadratic(&w);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Same mixture in another scalar type.
    pub fn cast<U: Real>(&self) -> MixtureModel<U> {
        MixtureModel {
            weights: self.weights.iter().map(|&w| cast_scalar(w)).collect(),
            means: self
                .means
                .iter()
                .map(|m| m.iter().map(|&x| cast_scalar(x)).collect())
                .collect(),
            form: self.form.cast(),
        }
    }

    /// Applies `x ↦ Q x + shift` to every mean. The form is left as is, so
    /// `Q` should preserve it.
    pub fn moved(&self, q: &Matrix<T>, shift: &[T]) -> Result<Self> {
        let d = self.d();
        if q.rows() != d || q.cols() != d || shift.len() != d {
            return Err(Error::Dimension {
                expected: d,
                got: shift.len().min(q.rows()),
            });
        }
        let means = self
            .means
            .iter()
            .map(|m| q.matvec(m).into_iter().zip(shift).map(|(x, &s)| x + s).collect())
            .collect();
        Ok(MixtureModel {
            weights: self.weights.clone(),
            means,
            form: self.form.clone(),
        })
    }

    /// Component `i` of the result is component `perm[i]` of `self`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let k = self.k();
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidModel("not a permutation".into()));
        }
        Ok(MixtureModel {
            weights: perm.iter().map(|&p| self.weights[p]).collect(),
            means: perm.iter().map(|&p| self.means[p].clone()).collect(),
            form: self.form.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_pythagoras() {
        let f = DistanceForm::<f64>::Euclidean;
        assert_eq!(sq_distance(&f, &[0.0, 0.0], &[3.0, 4.0]).unwrap(), 25.0);
    }

    #[test]
    fn zero_for_identical_points() {
        let forms = [
            DistanceForm::<f64>::Euclidean,
            DistanceForm::diagonal(vec![1, -1]).unwrap(),
            DistanceForm::matrix(Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, -3.0]])).unwrap(),
        ];
        for f in &forms {
            assert_eq!(sq_distance(f, &[1.5, -2.0], &[1.5, -2.0]).unwrap(), 0.0);
        }
    }

    #[test]
    fn diagonal_signs_evaluation() {
        let f = DistanceForm::<f64>::diagonal(vec![1, -1]).unwrap();
        assert_eq!(sq_distance(&f, &[1.0, 2.0], &[0.0, 0.0]).unwrap(), -3.0);
    }

    #[test]
    fn dimension_mismatch() {
        let f = DistanceForm::<f64>::Euclidean;
        assert!(matches!(
            sq_distance(&f, &[1.0], &[1.0, 2.0]),
            Err(Error::Dimension { .. })
        ));
        let g = DistanceForm::<f64>::diagonal(vec![1, 1, -1]).unwrap();
        assert!(matches!(
            sq_distance(&g, &[1.0, 0.0], &[1.0, 2.0]),
            Err(Error::Dimension { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn form_validation() {
        assert!(DistanceForm::<f64>::diagonal(vec![1, 0]).is_err());
        assert!(DistanceForm::<f64>::diagonal(vec![1, 2]).is_err());
        let asym = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]);
        assert!(DistanceForm::matrix(asym).is_err());
        let singular = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(DistanceForm::matrix(singular).is_err());
        let ok = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
        let f = DistanceForm::matrix(ok).unwrap();
        assert_eq!(f.signature(2), (1, 1));
    }

    #[test]
    fn canonical_euclidean_is_all_plus() {
        let f = DistanceForm::<f64>::Euclidean.canonical(3);
        assert_eq!(f, DistanceForm::Diagonal(vec![1, 1, 1]));
        assert!(f.is_euclidean());
        let u = [1.0, -2.0, 0.5];
        let v = [0.25, 4.0, -1.0];
        assert_eq!(
            sq_distance(&f, &u, &v).unwrap(),
            sq_distance(&DistanceForm::Euclidean, &u, &v).unwrap()
        );
    }

    #[test]
    fn model_validation() {
        let means = vec![vec![0.0], vec![1.0]];
        assert!(MixtureModel::euclidean(vec![0.5, 0.5], means.clone()).is_ok());
        assert!(MixtureModel::euclidean(vec![0.6, 0.5], means.clone()).is_err());
        assert!(MixtureModel::euclidean(vec![1.0, 0.0], means.clone()).is_err());
        assert!(MixtureModel::euclidean(vec![1.0], means.clone()).is_err());
        assert!(MixtureModel::euclidean(vec![0.5, 0.5], vec![vec![0.0], vec![1.0, 2.0]]).is_err());
        let bad_form = DistanceForm::diagonal(vec![1, -1]).unwrap();
        assert!(MixtureModel::new(vec![0.5, 0.5], means, bad_form).is_err());
    }

    #[test]
    fn relabel_and_move() {
        let m = MixtureModel::euclidean(vec![0.25, 0.75], vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let r = m.relabeled(&[1, 0]).unwrap();
        assert_eq!(r.weights(), &[0.75, 0.25]);
        assert!(m.relabeled(&[0, 0]).is_err());
        let rot = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let mv = m.moved(&rot, &[2.0, 3.0]).unwrap();
        assert_eq!(mv.means()[1], vec![2.0, 4.0]);
        assert_eq!(mv.mean_sq_distances()[(0, 1)], 1.0);
    }
}
