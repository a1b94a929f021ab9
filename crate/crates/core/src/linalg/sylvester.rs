//! Bartels–Stewart solvers for `A·X + X·B = C` and `A·X + X·Aᵀ = C`.
//!
//! Both coefficient matrices are reduced to upper quasi-triangular form and
//! the transformed system is solved by block back-substitution with 1×1/2×2
//! blocks. A coefficient that is already quasi-upper-triangular is used
//! directly; one that is quasi-lower-triangular is brought to upper form by
//! the index-reversal permutation instead of a fresh Schur factorization.

use num_complex::Complex64;

use super::schur::{is_quasi_upper_triangular, real_schur, schur_blocks, schur_eigenvalues, small_sylvester};
use super::{LinalgError, Matrix, Real};

/// Orthogonal basis taking a coefficient matrix to quasi-triangular form.
enum Basis<T> {
    Identity,
    Reversal,
    Orthogonal(Matrix<T>),
}

impl<T: Real> Basis<T> {
    /// `Bᵀ·m`
    fn left_t(&self, m: &Matrix<T>) -> Matrix<T> {
        match self {
            Basis::Identity => m.clone(),
            Basis::Reversal => Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(m.rows() - 1 - i, j)]),
            Basis::Orthogonal(u) => &u.transpose() * m,
        }
    }

    /// `B·m`
    fn left(&self, m: &Matrix<T>) -> Matrix<T> {
        match self {
            Basis::Identity => m.clone(),
            Basis::Reversal => Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(m.rows() - 1 - i, j)]),
            Basis::Orthogonal(u) => u * m,
        }
    }

    /// `m·B`
    fn right(&self, m: &Matrix<T>) -> Matrix<T> {
        match self {
            Basis::Identity => m.clone(),
            Basis::Reversal => Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, m.cols() - 1 - j)]),
            Basis::Orthogonal(u) => m * u,
        }
    }

    /// `m·Bᵀ`
    fn right_t(&self, m: &Matrix<T>) -> Matrix<T> {
        match self {
            Basis::Identity => m.clone(),
            Basis::Reversal => Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, m.cols() - 1 - j)]),
            Basis::Orthogonal(u) => m.mul_transpose(u),
        }
    }
}

fn reversed<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.rows();
    Matrix::from_fn(n, n, |i, j| a[(n - 1 - i, n - 1 - j)])
}

fn quasi_triangular_form<T: Real>(a: &Matrix<T>) -> Result<(Basis<T>, Matrix<T>), LinalgError> {
    if is_quasi_upper_triangular(a) {
        return Ok((Basis::Identity, a.clone()));
    }
    let r = reversed(a);
    if is_quasi_upper_triangular(&r) {
        return Ok((Basis::Reversal, r));
    }
    let (u, t) = real_schur(a)?;
    Ok((Basis::Orthogonal(u), t))
}

fn to_c64<T: Real>(z: num_complex::Complex<T>) -> Complex64 {
    Complex64::new(z.re.as_f64(), z.im.as_f64())
}

/// Singularity threshold for `min |λᵢ(a) + λⱼ(b)|` given the two norms.
pub fn singularity_threshold<T: Real>(norm_a: T, norm_b: T) -> T {
    T::of(100.0) * T::epsilon() * (norm_a + norm_b)
}

/// Fails with [`LinalgError::NearSingular`] when some eigenvalue sum of the
/// two quasi-triangular factors falls below the singularity threshold.
fn check_spectrum<T: Real>(ta: &Matrix<T>, tb: &Matrix<T>, threshold: T) -> Result<(), LinalgError> {
    let ea = schur_eigenvalues(ta);
    let eb = schur_eigenvalues(tb);
    let mut worst: Option<(Complex64, Complex64, f64)> = None;
    for &la in &ea {
        for &lb in &eb {
            let gap = (la + lb).norm().as_f64();
            if worst.is_none() || worst.is_some_and(|w| gap < w.2) {
                worst = Some((to_c64(la), to_c64(lb), gap));
            }
        }
    }
    match worst {
        Some((lambda_a, lambda_b, gap)) if gap <= threshold.as_f64() => {
            Err(LinalgError::NearSingular { lambda_a, lambda_b, gap, threshold: threshold.as_f64() })
        }
        _ => Ok(()),
    }
}

/// Solves `ta·Y + Y·tb = c` for upper quasi-triangular `ta`, `tb`.
fn solve_quasi_triangular<T: Real>(ta: &Matrix<T>, tb: &Matrix<T>, c: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    let m = ta.rows();
    let n = tb.rows();
    let row_blocks = schur_blocks(ta);
    let col_blocks = schur_blocks(tb);
    let mut y = Matrix::zeros(m, n);
    for &(cl, ql) in &col_blocks {
        for &(rk, pk) in row_blocks.iter().rev() {
            let mut rhs = c.block(rk, cl, pk, ql);
            for r in 0..pk {
                for s in 0..ql {
                    let mut acc = T::zero();
                    for i in rk + pk..m {
                        acc += ta[(rk + r, i)] * y[(i, cl + s)];
                    }
                    for j in 0..cl {
                        acc += y[(rk + r, j)] * tb[(j, cl + s)];
                    }
                    rhs[(r, s)] -= acc;
                }
            }
            let akk = ta.block(rk, rk, pk, pk);
            let bll = tb.block(cl, cl, ql, ql);
            let blk = small_sylvester(&akk, &bll, &rhs, T::one())?;
            y.set_block(rk, cl, &blk);
        }
    }
    Ok(y)
}

fn check_shapes<T: Real>(a: &Matrix<T>, b: &Matrix<T>, c: &Matrix<T>, op: &'static str) -> Result<(), LinalgError> {
    if !a.is_square() || !b.is_square() || c.rows() != a.rows() || c.cols() != b.rows() {
        return Err(LinalgError::Dimension {
            op,
            detail: format!("a {}x{}, b {}x{}, c {}x{}", a.rows(), a.cols(), b.rows(), b.cols(), c.rows(), c.cols()),
        });
    }
    if !a.is_finite() || !b.is_finite() || !c.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    Ok(())
}

/// Solves `a·X + X·b = c`.
///
/// Errors with [`LinalgError::NearSingular`] when `λᵢ(a) + λⱼ(b)` is within
/// `100·ε·(‖a‖_F + ‖b‖_F)` of zero for some pair; the offending pair is
/// carried in the error.
pub fn solve_sylvester<T: Real>(a: &Matrix<T>, b: &Matrix<T>, c: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    check_shapes(a, b, c, "solve_sylvester")?;
    let (ua, ta) = quasi_triangular_form(a)?;
    let (vb, tb) = quasi_triangular_form(b)?;
    check_spectrum(&ta, &tb, singularity_threshold(a.frobenius_norm(), b.frobenius_norm()))?;
    let cc = vb.right(&ua.left_t(c));
    let y = solve_quasi_triangular(&ta, &tb, &cc)?;
    let x = vb.right_t(&ua.left(&y));
    if !x.is_finite() {
        return Err(LinalgError::Overflow { op: "solve_sylvester" });
    }
    Ok(x)
}

/// Solves `a·X + X·aᵀ = c` given a real Schur pair `a = u·t·uᵀ`. The result
/// is symmetrized.
pub(crate) fn solve_lyapunov_schur<T: Real>(
    u: &Matrix<T>,
    t: &Matrix<T>,
    a_norm: T,
    c: &Matrix<T>,
) -> Result<Matrix<T>, LinalgError> {
    let tb = reversed(&t.transpose());
    check_spectrum(t, &tb, singularity_threshold(a_norm, a_norm))?;
    // t·Y + Y·tᵀ = uᵀ·c·u, and tᵀ = J·tb·J
    let cc = &(&u.transpose() * c) * u;
    let cc = Basis::Reversal.right(&cc);
    let y = solve_quasi_triangular(t, &tb, &cc)?;
    let y = Basis::<T>::Reversal.right_t(&y);
    let x = (u * &y).mul_transpose(u).symmetrize();
    if !x.is_finite() {
        return Err(LinalgError::Overflow { op: "solve_lyapunov" });
    }
    Ok(x)
}

/// Solves `a·X + X·aᵀ = c` for symmetric `c`; the result is symmetrized.
pub fn solve_lyapunov<T: Real>(a: &Matrix<T>, c: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    check_shapes(a, a, c, "solve_lyapunov")?;
    let (u, t) = if is_quasi_upper_triangular(a) { (Matrix::identity(a.rows()), a.clone()) } else { real_schur(a)? };
    solve_lyapunov_schur(&u, &t, a.frobenius_norm(), c)
}

/// `‖a·X + X·b − c‖_F / ((‖a‖_F + ‖b‖_F)·‖X‖_F)`.
pub fn sylvester_residual<T: Real>(a: &Matrix<T>, b: &Matrix<T>, c: &Matrix<T>, x: &Matrix<T>) -> f64 {
    let r = &(&(a * x) + &(x * b)) - c;
    let denom = (a.frobenius_norm() + b.frobenius_norm()).as_f64() * x.frobenius_norm().as_f64();
    let num = r.frobenius_norm().as_f64();
    if denom == 0.0 {
        num
    } else {
        num / denom
    }
}
