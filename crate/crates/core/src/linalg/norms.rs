use super::{Matrix, Real};

const JACOBI_SWEEPS: usize = 60;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// Only the symmetric part of `m` is used.
pub fn symmetric_eigenvalues<T: Real>(m: &Matrix<T>) -> Vec<T> {
    assert!(m.is_square(), "symmetric_eigenvalues needs a square matrix");
    let n = m.rows();
    let mut a = m.symmetrize();
    let scale = a.frobenius_norm();
    if scale == T::zero() {
        return vec![T::zero(); n];
    }
    for _ in 0..JACOBI_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= T::epsilon() * T::of(1e-2) * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Largest singular value `‖m‖₂`.
pub fn spectral_norm<T: Real>(m: &Matrix<T>) -> T {
    let scale = m.max_abs();
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    // Scale first so the Gram matrix cannot overflow. Divide rather than
    // multiply: the reciprocal of a subnormal scale is infinite.
    let ms = m.map(|x| x / scale);
    let gram = if m.rows() <= m.cols() { ms.mul_transpose(&ms) } else { ms.transpose().mul_transpose(&ms.transpose()) };
    let top = symmetric_eigenvalues(&gram).last().copied().unwrap_or(T::zero());
    scale * top.max(T::zero()).sqrt()
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue<T: Real>(m: &Matrix<T>) -> T {
    symmetric_eigenvalues(m)[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_examples() {
        assert_eq!(spectral_norm(&Matrix::<f64>::zeros(3, 2)), 0.0);
        assert!((spectral_norm(&Matrix::diag(&[3.0f64, -5.0])) - 5.0).abs() < 1e-15);
        assert!((spectral_norm(&Matrix::from_rows(&[[0.0f64, 2.0], [0.0, 0.0]])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_norm_of_subnormal_matrix() {
        let tiny = f64::MIN_POSITIVE / 16.0;
        let got = spectral_norm(&Matrix::diag(&[tiny, -tiny / 2.0]));
        assert_eq!(got, tiny);
    }

    #[test]
    fn spectral_norm_of_rectangular() {
        // rank one: ‖u·vᵀ‖₂ = ‖u‖·‖v‖
        let m = Matrix::from_rows(&[[1.0, 2.0, 2.0], [2.0, 4.0, 4.0]]);
        assert!((spectral_norm(&m) - 5f64.sqrt() * 3.0).abs() < 1e-14);
        assert!((spectral_norm(&m.transpose()) - 5f64.sqrt() * 3.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_eigenvalues_of_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let ev = symmetric_eigenvalues(&Matrix::from_rows(&[[2.0f64, 1.0], [1.0, 2.0]]));
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
        assert!((min_eigenvalue(&Matrix::diag(&[4.0f64, -0.5, 1.0])) + 0.5).abs() < 1e-16);
    }
}
