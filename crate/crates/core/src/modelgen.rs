//! Test systems: a seeded random ensemble, the constant-velocity model and
//! the observer canonical form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::discretize::ContinuousModel;
use crate::linalg::{spectral_norm, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid ensemble: {0}")]
    InvalidSpec(String),
    #[error("invalid transfer function: {0}")]
    InvalidTransferFunction(String),
}

/// Shape and sampling parameters of the random ensemble.
///
/// Each system has `m` stable poles and a single chain of `p` integrators,
/// `n = m + p`. Real parts are drawn uniformly from `pole_real_range` and
/// then rescaled so the fastest pole has real part `−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub seed: u64,
    pub pole_real_range: (f64, f64),
    pub coupling_scale: f64,
}

impl EnsembleSpec {
    pub fn new(m: usize, p: usize, seed: u64) -> Self {
        EnsembleSpec { n: m + p, m, p, seed, pole_real_range: (-1.0, -0.05), coupling_scale: 1.0 }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let (lo, hi) = self.pole_real_range;
        let bad = |msg: String| Err(ModelError::InvalidSpec(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.m + self.p != self.n {
            return bad(format!("n = {} but m + p = {}", self.n, self.m + self.p));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi && hi < 0.0) {
            return bad(format!("pole real range [{lo}, {hi}] must be finite, ordered and negative"));
        }
        if !(self.coupling_scale.is_finite() && self.coupling_scale >= 0.0) {
            return bad(format!("coupling scale {} must be finite and non-negative", self.coupling_scale));
        }
        Ok(())
    }
}

impl Default for EnsembleSpec {
    /// Six states: four stable poles and two integrators.
    fn default() -> Self {
        EnsembleSpec::new(4, 2, 0)
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-distributed orthogonal matrix: Gram–Schmidt on a Gaussian matrix,
/// twice for stability, with the sign fixed by the diagonal of the triangular factor.
fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
    let mut q = Matrix::from_fn(n, n, |_, _| normal(rng));
    for j in 0..n {
        let mut r_jj = 0.0;
        for _ in 0..2 {
            for k in 0..j {
                let dot: f64 = (0..n).map(|i| q[(i, k)] * q[(i, j)]).sum();
                for i in 0..n {
                    q[(i, j)] -= dot * q[(i, k)];
                }
            }
            r_jj = (0..n).map(|i| q[(i, j)] * q[(i, j)]).sum::<f64>().sqrt();
            for i in 0..n {
                q[(i, j)] /= r_jj;
            }
        }
        debug_assert!(r_jj > 0.0);
    }
    q
}

/// System number `index` of the ensemble. Each index draws from its own
/// stream of the seeded generator, so systems can be generated in any order.
pub fn gen_system(spec: &EnsembleSpec, index: u64) -> Result<ContinuousModel<f64>, ModelError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let (n, m) = (spec.n, spec.m);
    let (lo, hi) = spec.pole_real_range;

    let mut core = Matrix::zeros(n, n);
    let mut fastest = 0.0f64;
    let mut i = 0;
    while i < m {
        let re = rng.gen_range(lo..=hi);
        fastest = fastest.max(re.abs());
        if m - i >= 2 && rng.gen_bool(0.5) {
            let im = rng.gen_range(0.05..=1.0) * lo.abs();
            core[(i, i)] = re;
            core[(i + 1, i + 1)] = re;
            core[(i, i + 1)] = im;
            core[(i + 1, i)] = -im;
            i += 2;
        } else {
            core[(i, i)] = re;
            i += 1;
        }
    }
    for j in m..n.saturating_sub(1) {
        core[(j, j + 1)] = 1.0;
    }
    for r in 0..m {
        for c in m..n {
            core[(r, c)] = normal(&mut rng) * spec.coupling_scale;
        }
    }
    if m > 0 {
        core = core.map(|x| x / fastest);
    }

    let u = random_orthogonal(n, &mut rng);
    let a = (&u * &core).mul_transpose(&u);
    let g = Matrix::from_fn(n, n, |_, _| normal(&mut rng));
    let s = g.mul_transpose(&g);
    let s = s.scale(1.0 / spectral_norm(&s)).symmetrize();
    ContinuousModel::new(a, s).map_err(|e| ModelError::InvalidSpec(e.to_string()))
}

/// The first system of the ensemble.
pub fn gen_random_system(spec: &EnsembleSpec) -> Result<ContinuousModel<f64>, ModelError> {
    gen_system(spec, 0)
}

/// `ẋ = [[0, 1], [0, 0]]·x + [0, 1]ᵀ·w`: position driven by white-noise acceleration.
pub fn constant_velocity() -> ContinuousModel<f64> {
    ContinuousModel::new(Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]), Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0]]))
        .expect("constant-velocity model is valid")
}

/// Observer canonical realization of
/// `(b₁sᵐ⁻¹ + … + b_m) / (sᵐ + a₁sᵐ⁻¹ + … + a_m) · 1/sᵖ`
/// driven by unit-intensity white noise, together with the input column `B`.
///
/// `A` has `−a` in its first column and ones on the superdiagonal, so it is
/// block upper triangular with the `p` integrators trailing. `B` holds `p`
/// zeros followed by `b₁ … b_m`, and `S = B·Bᵀ`.
pub fn observer_canonical_with_input(
    a_coeffs: &[f64],
    b_coeffs: &[f64],
    p: usize,
) -> Result<(ContinuousModel<f64>, Matrix<f64>), ModelError> {
    let m = a_coeffs.len();
    let bad = |msg: String| Err(ModelError::InvalidTransferFunction(msg));
    if m == 0 {
        return bad("denominator needs at least one coefficient".into());
    }
    if b_coeffs.len() != m {
        return bad(format!("{} numerator coefficients for a degree-{m} denominator", b_coeffs.len()));
    }
    if a_coeffs[m - 1] == 0.0 {
        return bad("a_m = 0 puts a pole at the origin; count it in p instead".into());
    }
    let n = m + p;
    let mut a = Matrix::zeros(n, n);
    for (i, &ai) in a_coeffs.iter().enumerate() {
        a[(i, 0)] = -ai;
    }
    for i in 0..n - 1 {
        a[(i, i + 1)] += 1.0;
    }
    let b = Matrix::from_fn(n, 1, |i, _| if i < p { 0.0 } else { b_coeffs[i - p] });
    let s = b.mul_transpose(&b);
    let model = ContinuousModel::new(a, s).map_err(|e| ModelError::InvalidTransferFunction(e.to_string()))?;
    Ok((model, b))
}

pub fn observer_canonical(a_coeffs: &[f64], b_coeffs: &[f64], p: usize) -> Result<ContinuousModel<f64>, ModelError> {
    observer_canonical_with_input(a_coeffs, b_coeffs, p).map(|(m, _)| m)
}
