use crate::linalg::{spectral_norm, LinalgError, Matrix, Real};

use super::{discretize, ContinuousModel, DiscretizeError, Method};

fn relative<T: Real>(num: T, den: T, s: &Matrix<T>) -> f64 {
    if num == T::zero() {
        return 0.0;
    }
    let floor = (T::epsilon() * spectral_norm(s)).max(T::min_positive_value());
    (num / den.max(floor)).as_f64()
}

/// Relative violation of the splitting identity
/// `Q(t₁+t₂) = F(t₂)·Q(t₁)·F(t₂)ᵀ + Q(t₂)` for `method`.
///
/// Normalized by `‖Q(t₁+t₂)‖₂`, floored at `ε·‖S‖₂`.
pub fn semigroup_residual<T: Real>(
    m: &ContinuousModel<T>,
    method: Method,
    t1: T,
    t2: T,
) -> Result<f64, DiscretizeError> {
    let whole = discretize(m, method, t1 + t2)?;
    let first = discretize(m, method, t1)?;
    let second = discretize(m, method, t2)?;
    let composed = &first.model.q().congruence(second.model.f()) + second.model.q();
    let num = spectral_norm(&(whole.model.q() - &composed));
    Ok(relative(num, spectral_norm(whole.model.q()), m.s()))
}

/// Relative residual of `A·Q + Q·Aᵀ + S − F·S·Fᵀ = 0`, which the exact `Q`
/// satisfies for every `A`.
///
/// The residual is divided by `2‖A‖₂‖Q‖₂ + ‖S‖₂(1 + ‖F‖₂²)`, the size of the
/// terms that cancel, so rounding alone yields a value of order `ε`.
pub fn lemma2_residual<T: Real>(m: &ContinuousModel<T>, f: &Matrix<T>, q: &Matrix<T>) -> Result<f64, DiscretizeError> {
    let n = m.dim();
    for (name, x) in [("f", f), ("q", q)] {
        if x.rows() != n || x.cols() != n {
            return Err(LinalgError::Dimension {
                op: "lemma2_residual",
                detail: format!("{name} is {}x{}, model is {n}x{n}", x.rows(), x.cols()),
            }
            .into());
        }
    }
    let a = m.a();
    let s = m.s();
    let aq = a * q;
    let r = &(&(&aq + &aq.transpose()) + s) - &s.congruence(f);
    let nf = spectral_norm(f);
    let den = T::of(2.0) * spectral_norm(a) * spectral_norm(q) + spectral_norm(s) * (T::one() + nf * nf);
    Ok(relative(spectral_norm(&r), den, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{naive_q_b, q_oracle};
    use crate::linalg::mat_exp;

    fn scalar() -> ContinuousModel<f64> {
        ContinuousModel::new(Matrix::from_rows(&[[-1.0]]), Matrix::from_rows(&[[2.0]])).unwrap()
    }

    #[test]
    fn zero_second_step_is_exact() {
        for method in Method::ALL {
            assert_eq!(semigroup_residual(&scalar(), method, 0.8, 0.0).unwrap(), 0.0, "{method}");
        }
    }

    #[test]
    fn naive_rescaling_breaks_splitting() {
        assert!(semigroup_residual(&scalar(), Method::NaiveB, 1.0, 1.0).unwrap() > 0.1);
        assert!(semigroup_residual(&scalar(), Method::NaiveA, 1.0, 1.0).unwrap() > 1e-3);
        assert!(semigroup_residual(&scalar(), Method::Proposed, 1.0, 1.0).unwrap() < 1e-15);
    }

    #[test]
    fn certificate_separates_exact_from_naive() {
        let m = scalar();
        let f = mat_exp(m.a(), 1.0).unwrap();
        let q = q_oracle(&m, 1.0, 1e-13).unwrap();
        assert!(lemma2_residual(&m, &f, &q).unwrap() <= 1e-10);
        let q = naive_q_b(&m, 1.0);
        assert!(lemma2_residual(&m, &f, &q).unwrap() > 0.1);
    }

    #[test]
    fn certificate_rejects_wrong_shape() {
        let m = scalar();
        assert!(lemma2_residual(&m, &Matrix::identity(2), &Matrix::zeros(1, 1)).is_err());
    }
}
