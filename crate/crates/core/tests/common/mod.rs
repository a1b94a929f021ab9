#![allow(dead_code)]

use noisedisc::linalg::{real_schur, spectral_norm};
use noisedisc::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Schur vectors of a Gaussian matrix: orthogonal, and random enough here.
pub fn orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
    real_schur(&gaussian(n, n, rng)).unwrap().0
}

/// `‖x − y‖₂ / ‖y‖₂`.
pub fn rel(x: &Matrix<f64>, y: &Matrix<f64>) -> f64 {
    spectral_norm(&(x - y)) / spectral_norm(y)
}

/// Block-diagonal matrix with the given real eigenvalues and complex pairs.
pub fn with_spectrum(real: &[f64], pairs: &[(f64, f64)]) -> Matrix<f64> {
    let n = real.len() + 2 * pairs.len();
    let mut a = Matrix::zeros(n, n);
    let mut i = 0;
    for &(re, im) in pairs {
        a[(i, i)] = re;
        a[(i + 1, i + 1)] = re;
        a[(i, i + 1)] = im;
        a[(i + 1, i)] = -im;
        i += 2;
    }
    for &l in real {
        a[(i, i)] = l;
        i += 1;
    }
    a
}
