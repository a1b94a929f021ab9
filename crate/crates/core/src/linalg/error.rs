use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("overflow in {op}: result is not finite")]
    Overflow { op: &'static str },

    #[error("QR iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error(
        "near-singular Sylvester operator: eigenvalues {lambda_a} and {lambda_b} sum to {gap:.3e} \
         (threshold {threshold:.3e}); the equation has no unique solution"
    )]
    NearSingular { lambda_a: Complex64, lambda_b: Complex64, gap: f64, threshold: f64 },

    #[error("eigenvalue classification failed for block at {index}: {detail}")]
    Classification { index: usize, detail: String },

    #[error("block swap at {index} rejected: residual {residual:.3e}")]
    SwapRejected { index: usize, residual: f64 },

    #[error("matrix is singular to working precision")]
    Singular,
}
