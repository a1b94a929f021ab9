//! Exact discretization of `dx = A·x dt + dβ`, `E[dβ dβᵀ] = S dt`.
//!
//! Over a step of length `T` the discrete model is `x⁺ = F·x + w` with
//! `F = e^{AT}` and `Cov(w) = Q = ∫₀ᵀ e^{Aτ} S e^{Aᵀτ} dτ`. Every method here
//! returns the pair `(F, Q)`; they differ in how `Q` is obtained and in which
//! spectra they can handle.

mod methods;
mod model;
mod oracle;
mod residual;
mod transform;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::LinalgError;

pub use methods::{
    discretize, discretize_lyap_p, discretize_lyap_q, discretize_proposed, discretize_proposed_with,
    discretize_vanloan, naive_q_a, naive_q_b, q_nilpotent,
};
pub use model::{ContinuousModel, DiscreteModel};
pub use oracle::{q_oracle, q_oracle_with_depth, DEFAULT_ORACLE_TOL, MAX_ORACLE_DEPTH};
pub use residual::{lemma2_residual, semigroup_residual};
pub use transform::{transform_model, transform_result};

/// The discretization methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Stationary covariance `P`, then `Q = P − F·P·Fᵀ`. Stable `A` only.
    LyapP,
    /// Lyapunov equation `A·Q + Q·Aᵀ = −(S − F·S·Fᵀ)`. No integrators.
    LyapQ,
    /// Ordered Schur form, integrators handled in closed form.
    Proposed,
    /// One exponential of the `2n×2n` block matrix `[[A, S], [0, −Aᵀ]]`.
    VanLoan,
    /// Piecewise-constant noise, `Q = (1/T)·Ḡ·S·Ḡᵀ`. Not exact.
    NaiveA,
    /// `Q = T·S`. Not exact.
    NaiveB,
    /// Romberg quadrature of the defining integral in `f64`.
    Oracle,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::LyapP,
        Method::LyapQ,
        Method::Proposed,
        Method::VanLoan,
        Method::NaiveA,
        Method::NaiveB,
        Method::Oracle,
    ];

    /// The four closed-form exact methods.
    pub const EXACT: [Method; 4] = [Method::LyapP, Method::LyapQ, Method::Proposed, Method::VanLoan];

    pub fn name(self) -> &'static str {
        match self {
            Method::LyapP => "lyap-p",
            Method::LyapQ => "lyap-q",
            Method::Proposed => "proposed",
            Method::VanLoan => "vanloan",
            Method::NaiveA => "naive-a",
            Method::NaiveB => "naive-b",
            Method::Oracle => "oracle",
        }
    }

    /// True for the approximations that ignore the dynamics inside a step.
    pub fn is_naive(self) -> bool {
        matches!(self, Method::NaiveA | Method::NaiveB)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown method `{0}` (expected one of lyap-p, lyap-q, proposed, vanloan, naive-a, naive-b, oracle)")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| UnknownMethod(s.to_owned()))
    }
}

/// Why a method cannot treat a given spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstruction {
    /// Two eigenvalues sum to (numerically) zero.
    EigenvalueSum { lambda_a: Complex64, lambda_b: Complex64, gap: f64, threshold: f64 },
    /// Eigenvalues classified as zero.
    Integrators { count: usize, tau_zero: f64 },
    /// An eigenvalue with non-negative real part.
    Unstable { lambda: Complex64 },
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::EigenvalueSum { lambda_a, lambda_b, gap, threshold } => write!(
                f,
                "eigenvalue-sum singularity: {lambda_a:.6e} + {lambda_b:.6e} has modulus {gap:.3e} \
                 (threshold {threshold:.3e})"
            ),
            Obstruction::Integrators { count, tau_zero } => write!(
                f,
                "eigenvalue-sum singularity: {count} eigenvalue(s) within {tau_zero:.3e} of zero (integrators)"
            ),
            Obstruction::Unstable { lambda } => {
                write!(f, "not strictly stable: eigenvalue {lambda:.6e} has non-negative real part")
            }
        }
    }
}

impl Obstruction {
    pub(crate) fn from_linalg(e: &LinalgError) -> Option<Self> {
        match *e {
            LinalgError::NearSingular { lambda_a, lambda_b, gap, threshold } => {
                Some(Obstruction::EigenvalueSum { lambda_a, lambda_b, gap, threshold })
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscretizeError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid sampling time {0}: must be finite and non-negative")]
    InvalidTime(f64),

    #[error("{method} is not applicable: {reason}")]
    NotApplicable { method: Method, reason: Obstruction },

    #[error(
        "unsupported spectrum: non-zero eigenvalues {lambda_a:.6e} and {lambda_b:.6e} are mirrored in the \
         imaginary axis (|sum| = {gap:.3e}, threshold {threshold:.3e})"
    )]
    UnsupportedSpectrum { lambda_a: Complex64, lambda_b: Complex64, gap: f64, threshold: f64 },

    #[error("{method} overflowed: the result is not representable at this width")]
    Overflow { method: Method },

    #[error("quadrature did not converge after {depth} interval doublings (last change {change:.3e})")]
    NoConvergence { depth: usize, change: f64 },

    #[error("block is not nilpotent: ‖N^p‖_F = {residual:.3e} exceeds {bound:.3e}")]
    NotNilpotent { residual: f64, bound: f64 },

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl DiscretizeError {
    /// True when the method refused the spectrum rather than failing numerically.
    pub fn is_not_applicable(&self) -> bool {
        matches!(self, DiscretizeError::NotApplicable { .. } | DiscretizeError::UnsupportedSpectrum { .. })
    }

    pub fn is_overflow(&self) -> bool {
        matches!(self, DiscretizeError::Overflow { .. } | DiscretizeError::Linalg(LinalgError::Overflow { .. }))
    }
}

/// A named diagnostic value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diagnostic {
    Value(f64),
    NotApplicable,
}

impl Diagnostic {
    pub fn value(self) -> Option<f64> {
        match self {
            Diagnostic::Value(v) => Some(v),
            Diagnostic::NotApplicable => None,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Value(v) => write!(f, "{v:.6e}"),
            Diagnostic::NotApplicable => f.write_str("n/a"),
        }
    }
}

/// Diagnostics attached to a result, keyed by name and iterated in name order.
///
/// Always present: `sylvester_residual` and `lemma2_residual`. The proposed
/// method adds `split` and `integrators`, the stationary method adds
/// `stationary_residual`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics(BTreeMap<&'static str, Diagnostic>);

impl Diagnostics {
    pub fn insert(&mut self, name: &'static str, value: Diagnostic) {
        self.0.insert(name, value);
    }

    pub fn set(&mut self, name: &'static str, value: f64) {
        self.insert(name, Diagnostic::Value(value));
    }

    pub fn get(&self, name: &str) -> Option<Diagnostic> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, Diagnostic)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }
}

/// A discrete model together with the method that produced it.
#[derive(Debug, Clone)]
pub struct MethodReport<T: crate::linalg::Real> {
    pub model: DiscreteModel<T>,
    pub method: Method,
    pub diagnostics: Diagnostics,
}
