//! Matrix exponential by scaling and squaring with a diagonal Padé approximant.
//!
//! The degree is the smallest one whose 1-norm threshold covers `‖A·t‖₁`;
//! above the largest threshold the argument is halved until it fits and the
//! approximant is squared back up. Thresholds depend on the working width, so
//! single precision uses lower degrees than double.

use super::{lu, LinalgError, Matrix, Real};

/// Coefficients `b_k`, `k = 0..=m`, of the `[m/m]` Padé approximant of `eˣ`.
fn pade_coefficients(m: usize) -> Vec<f64> {
    let mut b = vec![1.0; m + 1];
    // b_k = b_{k-1} · (m - k + 1) / (k · (2m - k + 1))
    for k in 1..=m {
        b[k] = b[k - 1] * (m - k + 1) as f64 / (k as f64 * (2 * m - k + 1) as f64);
    }
    b
}

/// Returns `e^{a·t}`.
pub fn mat_exp<T: Real>(a: &Matrix<T>, t: T) -> Result<Matrix<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Dimension {
            op: "mat_exp",
            detail: format!("{}x{} is not square", a.rows(), a.cols()),
        });
    }
    if !t.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.rows();
    if t == T::zero() {
        return Ok(Matrix::identity(n));
    }
    let at = a.scale(t);
    if !at.is_finite() {
        return Err(LinalgError::Overflow { op: "mat_exp" });
    }
    let norm = at.norm_1().as_f64();

    let &(m_max, theta_max) = T::PADE_THETA.last().expect("no Padé degrees");
    let (degree, squarings) = match T::PADE_THETA.iter().find(|&&(_, theta)| norm <= theta) {
        Some(&(m, _)) => (m, 0),
        None => {
            let s = (norm / theta_max).log2().ceil().max(0.0) as i32;
            (m_max, s)
        }
    };
    let scaled = at.scale(T::of(2f64.powi(-squarings)));

    let b: Vec<T> = pade_coefficients(degree).into_iter().map(T::of).collect();
    let ident = Matrix::identity(n);
    let a2 = &scaled * &scaled;
    // even powers I, A², A⁴, ... up to A^(m-1)
    let mut even = vec![ident.clone(), a2.clone()];
    while 2 * (even.len() - 1) < degree - 1 {
        let next = &even[even.len() - 1] * &a2;
        even.push(next);
    }
    let mut u_inner = Matrix::zeros(n, n);
    let mut v = Matrix::zeros(n, n);
    for (j, p) in even.iter().enumerate() {
        let k_even = 2 * j;
        let k_odd = 2 * j + 1;
        if k_even <= degree {
            v = &v + &p.scale(b[k_even]);
        }
        if k_odd <= degree {
            u_inner = &u_inner + &p.scale(b[k_odd]);
        }
    }
    let u = &scaled * &u_inner;
    let num = &v + &u;
    let den = &v - &u;
    let mut r = lu::solve(&den, &num).map_err(|e| match e {
        LinalgError::Singular => LinalgError::Overflow { op: "mat_exp" },
        other => other,
    })?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(LinalgError::Overflow { op: "mat_exp" });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pade_coefficients_match_known_degree_3() {
        // [3/3]: 1, 1/2, 1/10, 1/120
        let b = pade_coefficients(3);
        let want = [1.0, 0.5, 0.1, 1.0 / 120.0];
        for (x, y) in b.iter().zip(want) {
            assert!((x - y).abs() < 1e-16);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let a = Matrix::from_rows(&[[3.0, -1.0], [7.0, 2.0]]);
        assert_eq!(mat_exp(&a, 0.0).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn nilpotent_series_terminates() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        for t in [0.5f64, 1.0, 7.0, 300.0] {
            let e = mat_exp(&a, t).unwrap();
            let want = Matrix::from_rows(&[[1.0, t], [0.0, 1.0]]);
            assert!((&e - &want).max_abs() <= 1e-15 * t.max(1.0), "t={t}: {e:?}");
        }
    }

    #[test]
    fn scalar_matches_libm() {
        for (x, t) in [(-1.0f64, 1.0), (2.5, -3.0), (0.3, 40.0), (-50.0, 0.7)] {
            let e = mat_exp(&Matrix::from_rows(&[[x]]), t).unwrap()[(0, 0)];
            let want = (x * t).exp();
            // relative error grows with |x·t|, the condition number of exp
            assert!((e - want).abs() <= 1e-14 * (x * t).abs().max(1.0) * want, "{x}*{t}: {e} vs {want}");
        }
        let e = mat_exp(&Matrix::from_rows(&[[-1.0f64]]), 1.0).unwrap()[(0, 0)];
        assert!((e - 0.36787944117144233).abs() <= 2.0 * f64::EPSILON * 0.37, "{e:e}");
    }

    #[test]
    fn single_precision_scalar() {
        let e = mat_exp(&Matrix::from_rows(&[[-1.0f32]]), 1.0).unwrap()[(0, 0)];
        assert!((e - (-1.0f32).exp()).abs() < 2.0 * f32::EPSILON);
    }

    #[test]
    fn rotation_generator() {
        // exp of [[0, w], [-w, 0]]·t is a rotation by w·t
        let w = 2.0f64;
        let t = 1.3;
        let e = mat_exp(&Matrix::from_rows(&[[0.0, w], [-w, 0.0]]), t).unwrap();
        let (s, c) = (w * t).sin_cos();
        let want = Matrix::from_rows(&[[c, s], [-s, c]]);
        assert!((&e - &want).max_abs() < 1e-14);
    }

    #[test]
    fn overflow_is_reported() {
        let a = Matrix::from_rows(&[[1.0f32]]);
        assert_eq!(mat_exp(&a, 200.0), Err(LinalgError::Overflow { op: "mat_exp" }));
        let a = Matrix::from_rows(&[[1.0f64]]);
        assert_eq!(mat_exp(&a, 1000.0), Err(LinalgError::Overflow { op: "mat_exp" }));
    }

    #[test]
    fn non_square_rejected() {
        let a = Matrix::from_rows(&[[1.0, 2.0]]);
        assert!(matches!(mat_exp(&a, 1.0), Err(LinalgError::Dimension { .. })));
    }
}
