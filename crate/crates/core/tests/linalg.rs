mod common;

use common::{gaussian, orthogonal, rng, with_spectrum};
use noisedisc::linalg::schur::{is_quasi_upper_triangular, schur_blocks};
use noisedisc::linalg::{
    default_zero_tolerance, mat_exp, min_eigenvalue, order_schur_zeros_last, real_schur, solve_lyapunov,
    solve_sylvester, spectral_norm, LinalgError,
};
use noisedisc::Matrix;
use proptest::prelude::*;

fn square(n: usize) -> impl Strategy<Value = Matrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |v| Matrix::new(n, n, v).unwrap())
}

fn sized_square() -> impl Strategy<Value = Matrix<f64>> {
    (1usize..7).prop_flat_map(square)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exponential_semigroup(a in sized_square(), s in 0.0..5.0f64, t in 0.0..5.0f64) {
        // ‖A‖·(s+t) ≤ 20
        let a = a.scale(2.0 / a.frobenius_norm().max(1.0));
        let whole = mat_exp(&a, s + t).unwrap();
        let split = &mat_exp(&a, s).unwrap() * &mat_exp(&a, t).unwrap();
        prop_assert!((&whole - &split).frobenius_norm() <= 1e-10 * whole.frobenius_norm());
    }

    #[test]
    fn exponential_commutes_with_generator(a in sized_square(), t in -3.0..3.0f64) {
        let e = mat_exp(&a, t).unwrap();
        let gap = (&(&a * &e) - &(&e * &a)).frobenius_norm();
        prop_assert!(gap <= 1e-12 * a.frobenius_norm().max(1.0) * e.frobenius_norm());
    }

    #[test]
    fn exponential_derivative_is_second_order(a in sized_square(), t in 0.0..2.0f64) {
        let e = mat_exp(&a, t).unwrap();
        let err = |h: f64| {
            let diff = (&mat_exp(&a, t + h).unwrap() - &mat_exp(&a, t - h).unwrap()).scale(0.5 / h);
            (&diff - &(&a * &e)).frobenius_norm()
        };
        let (coarse, fine) = (err(1e-2), err(5e-3));
        // Halving h divides a pure h² error by four; rounding adds ~ε/h.
        prop_assert!(fine <= coarse / 3.0 + 1e-10, "{coarse:e} -> {fine:e}");
    }

    #[test]
    fn ordered_schur_invariants(a in square(6), zeros in 0usize..3) {
        // Deflate `zeros` directions so that some runs carry exact zero eigenvalues.
        let mut a = a;
        for j in 0..zeros {
            for i in 0..6 {
                a[(i, j)] = 0.0;
            }
        }
        let (u0, t0) = real_schur(&a).unwrap();
        let tau = default_zero_tolerance(&a);
        let o = order_schur_zeros_last(&u0, &t0, tau).unwrap();
        let n = 6;
        let orth = &(&o.u.transpose() * &o.u) - &Matrix::identity(n);
        prop_assert!(orth.frobenius_norm() <= 1e-13 * n as f64);
        let back = (&o.u * &o.t).mul_transpose(&o.u);
        prop_assert!((&back - &a).frobenius_norm() <= 1e-12 * a.frobenius_norm().max(1e-300));
        prop_assert!(is_quasi_upper_triangular(&o.t));
        prop_assert!(schur_blocks(&o.t).iter().all(|&(start, size)| start + size <= o.split || start >= o.split));
        for i in o.split..n {
            for j in 0..o.split {
                prop_assert_eq!(o.t[(i, j)], 0.0);
            }
        }
        let ev = o.eigenvalues();
        for (i, l) in ev.iter().enumerate() {
            if i < o.split {
                prop_assert!(l.norm() > tau);
            } else {
                prop_assert!(l.norm() <= tau);
            }
        }
        prop_assert!(o.zero_count() >= zeros);
    }

    #[test]
    fn sylvester_residual_on_well_conditioned_instances(
        seed in any::<u64>(), p in 1usize..6, q in 1usize..6,
    ) {
        let mut r = rng(seed);
        // Row sums of the perturbation stay below 0.6, so every eigenvalue has
        // real part at most −0.4 and every eigenvalue sum at most −0.8.
        let shift = |n: usize, r: &mut rand_chacha::ChaCha8Rng| {
            let d: Vec<f64> = (0..n).map(|i| -1.0 - 2.0 * i as f64 / n as f64).collect();
            &Matrix::diag(&d) + &gaussian(n, n, r).map(|x| 0.6 / n as f64 * x.clamp(-1.0, 1.0))
        };
        let a = shift(p, &mut r);
        let b = shift(q, &mut r);
        let c = gaussian(p, q, &mut r);
        let x = solve_sylvester(&a, &b, &c).unwrap();
        let res = (&(&(&a * &x) + &(&x * &b)) - &c).frobenius_norm();
        let bound = 1e-13 * (a.frobenius_norm() + b.frobenius_norm()) * x.frobenius_norm();
        prop_assert!(res <= bound, "{res:e} > {bound:e}");
    }

    #[test]
    fn lyapunov_solution_is_symmetric_and_psd(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let u = orthogonal(n, &mut r);
        let poles: Vec<f64> = (0..n).map(|i| -0.1 - i as f64).collect();
        let a = (&u * &(&Matrix::diag(&poles) + &gaussian(n, n, &mut r).map(|x| 0.1 * x))).mul_transpose(&u);
        prop_assume!(noisedisc::linalg::eigenvalues(&a).unwrap().iter().all(|l| l.re < -0.01));
        let g = gaussian(n, n, &mut r);
        let s = g.mul_transpose(&g);
        let x = solve_lyapunov(&a, &s.scale(-1.0)).unwrap();
        prop_assert_eq!(&x, &x.transpose());
        prop_assert!(min_eigenvalue(&x) >= -1e-12 * spectral_norm(&x));
    }
}

#[test]
fn known_spectrum_splits_after_four() {
    let mut r = rng(17);
    for _ in 0..20 {
        let mut core = with_spectrum(&[-1.0, -0.5, 0.0, 0.0], &[(-2.0, 1.0)]);
        // Couple the stable part to the zeros and chain the zeros.
        for i in 0..4 {
            core[(i, 4)] = 0.3;
            core[(i, 5)] = -0.7;
        }
        core[(4, 5)] = 1.0;
        let u = orthogonal(6, &mut r);
        let a = (&u * &core).mul_transpose(&u);
        let (u0, t0) = real_schur(&a).unwrap();
        let o = order_schur_zeros_last(&u0, &t0, default_zero_tolerance(&a)).unwrap();
        assert_eq!(o.split, 4);
        let a22 = o.t.block(4, 4, 2, 2);
        let sq = &a22 * &a22;
        assert!(sq.max_abs() <= 1e-14 * a.frobenius_norm().powi(2), "{sq:?}");
    }
}

#[test]
fn lyapunov_refuses_integrators() {
    let a = Matrix::from_rows(&[[-1.0, 1.0], [0.0, 0.0]]);
    let err = solve_lyapunov(&a, &Matrix::identity(2).scale(-1.0)).unwrap_err();
    assert!(matches!(err, LinalgError::NearSingular { .. }));
}

#[test]
fn reconstruction_of_random_matrices() {
    let mut r = rng(3);
    for _ in 0..50 {
        let a = gaussian(6, 6, &mut r);
        let (u, t) = real_schur(&a).unwrap();
        let back = (&u * &t).mul_transpose(&u);
        assert!((&back - &a).frobenius_norm() <= 1e-13 * a.frobenius_norm());
    }
}
