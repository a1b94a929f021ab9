use crate::linalg::{min_eigenvalue, Matrix, Real};

use super::DiscretizeError;

/// Drift `A` and diffusion intensity `S` of a continuous-time linear system.
///
/// `S` is symmetrized on construction and must be positive semidefinite up
/// to `100·n·ε·‖S‖_F`.
#[derive(Debug, Clone)]
pub struct ContinuousModel<T: Real> {
    a: Matrix<T>,
    s: Matrix<T>,
}

fn psd_tolerance<T: Real>(m: &Matrix<T>) -> T {
    T::of(100.0 * m.rows() as f64) * T::epsilon() * m.frobenius_norm()
}

impl<T: Real> ContinuousModel<T> {
    pub fn new(a: Matrix<T>, s: Matrix<T>) -> Result<Self, DiscretizeError> {
        if !a.is_square() || !s.is_square() || a.rows() != s.rows() {
            return Err(DiscretizeError::InvalidModel(format!(
                "A is {}x{} and S is {}x{}; both must be n×n",
                a.rows(),
                a.cols(),
                s.rows(),
                s.cols()
            )));
        }
        if !a.is_finite() || !s.is_finite() {
            return Err(DiscretizeError::InvalidModel("non-finite entry".into()));
        }
        let tol = psd_tolerance(&s);
        let asym = (&s - &s.transpose()).frobenius_norm();
        if asym > tol {
            return Err(DiscretizeError::InvalidModel(format!("S is not symmetric: ‖S − Sᵀ‖_F = {asym:e}")));
        }
        let s = s.symmetrize();
        let lo = min_eigenvalue(&s);
        if lo < -tol {
            return Err(DiscretizeError::InvalidModel(format!(
                "S is not positive semidefinite: smallest eigenvalue {lo:e}"
            )));
        }
        Ok(ContinuousModel { a, s })
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn s(&self) -> &Matrix<T> {
        &self.s
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// Rounds both matrices to another width.
    ///
    /// Rounding can leave `S` a few ulps indefinite, so the result is not
    /// re-validated.
    pub fn cast<U: Real>(&self) -> ContinuousModel<U> {
        ContinuousModel { a: self.a.cast(), s: self.s.cast::<U>().symmetrize() }
    }

    pub(crate) fn from_parts_unchecked(a: Matrix<T>, s: Matrix<T>) -> Self {
        ContinuousModel { a, s }
    }
}

/// Transition matrix `F`, noise covariance `Q` and the step length they
/// belong to.
#[derive(Debug, Clone)]
pub struct DiscreteModel<T: Real> {
    f: Matrix<T>,
    q: Matrix<T>,
    horizon: T,
}

impl<T: Real> DiscreteModel<T> {
    /// `Q` is symmetrized.
    pub fn new(f: Matrix<T>, q: Matrix<T>, horizon: T) -> Self {
        DiscreteModel { f, q: q.symmetrize(), horizon }
    }

    /// `F = I`, `Q = 0`.
    pub fn zero_step(n: usize) -> Self {
        DiscreteModel { f: Matrix::identity(n), q: Matrix::zeros(n, n), horizon: T::zero() }
    }

    pub fn f(&self) -> &Matrix<T> {
        &self.f
    }

    pub fn q(&self) -> &Matrix<T> {
        &self.q
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn into_parts(self) -> (Matrix<T>, Matrix<T>, T) {
        (self.f, self.q, self.horizon)
    }

    pub fn cast<U: Real>(&self) -> DiscreteModel<U> {
        DiscreteModel { f: self.f.cast(), q: self.q.cast(), horizon: U::of(self.horizon.as_f64()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_values() {
        let a = Matrix::<f64>::identity(2);
        assert!(ContinuousModel::new(a.clone(), Matrix::identity(3)).is_err());
        assert!(ContinuousModel::<f64>::new(Matrix::zeros(2, 3), Matrix::identity(2)).is_err());
        let asym = Matrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]);
        assert!(ContinuousModel::new(a.clone(), asym).is_err());
        let indefinite = Matrix::diag(&[1.0, -1e-3]);
        assert!(ContinuousModel::new(a, indefinite).is_err());
    }

    #[test]
    fn symmetrizes_rounding_level_asymmetry() {
        let s = Matrix::from_rows(&[[2.0, 1.0 + 1e-16], [1.0, 2.0]]);
        let m = ContinuousModel::new(Matrix::<f64>::zeros(2, 2), s).unwrap();
        assert_eq!(m.s()[(0, 1)], m.s()[(1, 0)]);
    }

    #[test]
    fn accepts_rank_deficient_diffusion() {
        let m = ContinuousModel::<f64>::new(Matrix::zeros(2, 2), Matrix::diag(&[0.0, 1.0]));
        assert!(m.is_ok());
    }
}
