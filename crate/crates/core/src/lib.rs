//! Exact discretization of continuous-time linear stochastic systems.
//!
//! Given drift `A` and diffusion intensity `S`, computes the transition
//! matrix `F = e^{AT}` and the process-noise covariance
//! `Q = ∫₀ᵀ e^{Aτ} S e^{Aᵀτ} dτ` with several methods, all generic over
//! `f32` and `f64`.

pub mod bench;
pub mod discretize;
pub mod linalg;
pub mod modelgen;

pub use discretize::{
    discretize, ContinuousModel, Diagnostic, Diagnostics, DiscreteModel, DiscretizeError, Method, MethodReport,
};
pub use linalg::{LinalgError, Matrix, Real, Width};
