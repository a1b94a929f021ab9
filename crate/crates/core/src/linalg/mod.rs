//! Dense real linear-algebra kernels, generic over `f32` and `f64`.

mod error;
mod expm;
mod lu;
mod matrix;
mod norms;
mod real;
pub mod schur;
mod sylvester;

pub use error::LinalgError;
pub use expm::mat_exp;
pub use lu::{inverse, solve, Lu};
pub use matrix::Matrix;
pub use norms::{min_eigenvalue, spectral_norm, symmetric_eigenvalues};
pub use real::{Real, Width};
pub use schur::{default_zero_tolerance, eigenvalues, order_schur_zeros_last, real_schur, OrderedSchur};
pub use sylvester::{singularity_threshold, solve_lyapunov, solve_sylvester, sylvester_residual};

#[allow(unused_imports)]
pub(crate) use sylvester::solve_lyapunov_schur;
