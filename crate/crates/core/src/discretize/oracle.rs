//! Reference covariance by Romberg quadrature in double precision.
//!
//! The composite trapezoid rule on `[0, t]` is refined by interval halving
//! and extrapolated with Richardson's scheme. The integrand at `τ = k·t/2ᴸ`
//! needs `e^{Aτ}`; it is assembled from the directly computed exponentials
//! `e^{A·t/2ⁱ}`, one factor per set bit of `k`, so the error does not grow
//! with the number of nodes.

use crate::linalg::{mat_exp, Matrix};

use super::{ContinuousModel, DiscretizeError};

/// Default relative tolerance between successive extrapolated estimates.
pub const DEFAULT_ORACLE_TOL: f64 = 1e-12;

/// Default maximum number of interval halvings.
pub const MAX_ORACLE_DEPTH: usize = 24;

/// Levels that must be computed before convergence may be declared, so that a
/// coarse rule agreeing with itself by accident is not accepted.
const MIN_DEPTH: usize = 3;

/// Romberg estimate of `∫₀ᵗ e^{Aτ}·S·e^{Aᵀτ} dτ` to relative tolerance `rel_tol`.
pub fn q_oracle(m: &ContinuousModel<f64>, t: f64, rel_tol: f64) -> Result<Matrix<f64>, DiscretizeError> {
    q_oracle_with_depth(m, t, rel_tol, MAX_ORACLE_DEPTH)
}

pub fn q_oracle_with_depth(
    m: &ContinuousModel<f64>,
    t: f64,
    rel_tol: f64,
    max_depth: usize,
) -> Result<Matrix<f64>, DiscretizeError> {
    if !t.is_finite() || t < 0.0 {
        return Err(DiscretizeError::InvalidTime(t));
    }
    assert!(rel_tol > 0.0, "tolerance must be positive");
    let n = m.dim();
    if t == 0.0 {
        return Ok(Matrix::zeros(n, n));
    }
    let a = m.a();
    let s = m.s();
    let integrand = |e: &Matrix<f64>| s.congruence(e);

    // halves[i] = e^{A·t/2ⁱ}
    let mut halves = vec![mat_exp(a, t)?];
    let mut sum = &integrand(&Matrix::identity(n)) + &integrand(&halves[0]);
    let mut prev_row = vec![sum.scale(0.5 * t)];
    let mut change = f64::INFINITY;

    for level in 1..=max_depth {
        halves.push(mat_exp(a, t / f64::powi(2.0, level as i32))?);
        let h = t / f64::powi(2.0, level as i32);
        // new nodes are the odd multiples of h
        for k in (1..1usize << level).step_by(2) {
            let mut e = Matrix::identity(n);
            for bit in 0..level {
                if k >> bit & 1 == 1 {
                    e = &e * &halves[level - bit];
                }
            }
            sum = &sum + &integrand(&e).scale(2.0);
        }
        let mut row = vec![sum.scale(0.5 * h)];
        let mut factor = 1.0;
        for j in 1..=level {
            factor *= 4.0;
            let d = &row[j - 1] - &prev_row[j - 1];
            row.push(&row[j - 1] + &d.scale(1.0 / (factor - 1.0)));
        }
        let best = &row[level];
        let scale = best.frobenius_norm();
        change = (best - &prev_row[level - 1]).frobenius_norm();
        if !best.is_finite() {
            return Err(DiscretizeError::NoConvergence { depth: level, change: f64::INFINITY });
        }
        if level >= MIN_DEPTH && change <= rel_tol * scale {
            return Ok(best.symmetrize());
        }
        prev_row = row;
    }
    Err(DiscretizeError::NoConvergence { depth: max_depth, change })
}
