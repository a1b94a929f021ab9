//! Shared fixtures for the timing benchmarks.

use noisedisc::modelgen::{gen_system, EnsembleSpec};
use noisedisc::ContinuousModel;

/// Ensemble member `index` with `m` states and `p` integrators, seed 0.
pub fn ensemble_model(m: usize, p: usize, index: u64) -> ContinuousModel<f64> {
    gen_system(&EnsembleSpec::new(m, p, 0), index).expect("valid ensemble spec")
}

/// Stable system (no integrators) so that every closed-form method applies.
pub fn stable_model(n: usize) -> ContinuousModel<f64> {
    ensemble_model(n, 0, 0)
}

/// Sizes swept by the scaling benchmarks.
pub const SIZES: [usize; 4] = [2, 4, 8, 16];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_requested_shape() {
        assert_eq!(ensemble_model(4, 2, 3).dim(), 6);
        assert_eq!(stable_model(5).dim(), 5);
    }
}
