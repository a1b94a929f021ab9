//! State transformations `x = U·x̃`.

use crate::linalg::{LinalgError, Matrix, Real};

use super::{ContinuousModel, DiscreteModel, DiscretizeError};

fn check<T: Real>(n: usize, u: &Matrix<T>, u_inv: &Matrix<T>, op: &'static str) -> Result<(), DiscretizeError> {
    for x in [u, u_inv] {
        if x.rows() != n || x.cols() != n {
            return Err(LinalgError::Dimension {
                op,
                detail: format!("transformation is {}x{}, model is {n}x{n}", x.rows(), x.cols()),
            }
            .into());
        }
    }
    Ok(())
}

/// `(U⁻¹·A·U, U⁻¹·S·U⁻ᵀ)`. The caller supplies `u_inv`, which should be a
/// computed inverse even when `U` is orthogonal.
pub fn transform_model<T: Real>(
    m: &ContinuousModel<T>,
    u: &Matrix<T>,
    u_inv: &Matrix<T>,
) -> Result<ContinuousModel<T>, DiscretizeError> {
    check(m.dim(), u, u_inv, "transform_model")?;
    let a = &(u_inv * m.a()) * u;
    let s = m.s().congruence(u_inv);
    Ok(ContinuousModel::from_parts_unchecked(a, s))
}

/// Maps a discretization of the transformed model back:
/// `F = U·F̃·U⁻¹` (similarity) and `Q = U·Q̃·Uᵀ` (congruence).
pub fn transform_result<T: Real>(
    d: &DiscreteModel<T>,
    u: &Matrix<T>,
    u_inv: &Matrix<T>,
) -> Result<DiscreteModel<T>, DiscretizeError> {
    check(d.f().rows(), u, u_inv, "transform_result")?;
    let f = &(u * d.f()) * u_inv;
    let q = d.q().congruence(u);
    Ok(DiscreteModel::new(f, q, d.horizon()))
}
