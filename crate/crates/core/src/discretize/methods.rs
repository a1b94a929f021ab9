use num_complex::Complex64;

use crate::linalg::schur::schur_eigenvalues;
use crate::linalg::{
    default_zero_tolerance, inverse, mat_exp, order_schur_zeros_last, real_schur, singularity_threshold,
    solve_lyapunov, solve_lyapunov_schur, solve_sylvester, sylvester_residual, LinalgError, Matrix, Real,
};

use super::oracle::{q_oracle, DEFAULT_ORACLE_TOL};
use super::residual::lemma2_residual;
use super::{
    ContinuousModel, Diagnostic, Diagnostics, DiscreteModel, DiscretizeError, Method, MethodReport, Obstruction,
};

fn check_time<T: Real>(t: T) -> Result<(), DiscretizeError> {
    if !t.is_finite() || t < T::zero() {
        return Err(DiscretizeError::InvalidTime(t.as_f64()));
    }
    Ok(())
}

fn overflow_as(method: Method) -> impl Fn(LinalgError) -> DiscretizeError {
    move |e| match e {
        LinalgError::Overflow { .. } => DiscretizeError::Overflow { method },
        other => DiscretizeError::from(other),
    }
}

fn not_applicable_as(method: Method) -> impl Fn(LinalgError) -> DiscretizeError {
    move |e| match Obstruction::from_linalg(&e) {
        Some(reason) => DiscretizeError::NotApplicable { method, reason },
        None => overflow_as(method)(e),
    }
}

fn zero_step_report<T: Real>(m: &ContinuousModel<T>, method: Method) -> MethodReport<T> {
    let mut diagnostics = Diagnostics::default();
    diagnostics.insert("sylvester_residual", Diagnostic::NotApplicable);
    diagnostics.set("lemma2_residual", 0.0);
    MethodReport { model: DiscreteModel::zero_step(m.dim()), method, diagnostics }
}

/// Validates the output, fills in the certificate and packages the report.
fn finish<T: Real>(
    m: &ContinuousModel<T>,
    method: Method,
    f: Matrix<T>,
    q: Matrix<T>,
    t: T,
    mut diagnostics: Diagnostics,
) -> Result<MethodReport<T>, DiscretizeError> {
    if !f.is_finite() || !q.is_finite() {
        return Err(DiscretizeError::Overflow { method });
    }
    let model = DiscreteModel::new(f, q, t);
    diagnostics.set("lemma2_residual", lemma2_residual(m, model.f(), model.q())?);
    if diagnostics.get("sylvester_residual").is_none() {
        diagnostics.insert("sylvester_residual", Diagnostic::NotApplicable);
    }
    Ok(MethodReport { model, method, diagnostics })
}

/// Schur vectors, quasi-triangular factor and eigenvalues.
type SchurParts<T> = (Matrix<T>, Matrix<T>, Vec<Complex64>);

/// Schur pair of `A`, rejecting spectra with eigenvalues classified as zero.
fn schur_without_integrators<T: Real>(a: &Matrix<T>, method: Method) -> Result<SchurParts<T>, DiscretizeError> {
    let (u, t) = real_schur(a)?;
    let ev: Vec<Complex64> =
        schur_eigenvalues(&t).into_iter().map(|z| Complex64::new(z.re.as_f64(), z.im.as_f64())).collect();
    let tau = default_zero_tolerance(a).as_f64();
    let count = ev.iter().filter(|z| z.norm() <= tau).count();
    if count > 0 {
        return Err(DiscretizeError::NotApplicable {
            method,
            reason: Obstruction::Integrators { count, tau_zero: tau },
        });
    }
    Ok((u, t, ev))
}

/// Solves for the stationary covariance `P` (`A·P + P·Aᵀ = −S`) and returns
/// `Q = P − F·P·Fᵀ`. Requires every eigenvalue of `A` in the open left half-plane.
pub fn discretize_lyap_p<T: Real>(m: &ContinuousModel<T>, t: T) -> Result<MethodReport<T>, DiscretizeError> {
    const METHOD: Method = Method::LyapP;
    check_time(t)?;
    if t == T::zero() {
        return Ok(zero_step_report(m, METHOD));
    }
    let a = m.a();
    let (u, schur_t, ev) = schur_without_integrators(a, METHOD)?;
    if let Some(&lambda) = ev.iter().find(|z| z.re >= 0.0) {
        return Err(DiscretizeError::NotApplicable { method: METHOD, reason: Obstruction::Unstable { lambda } });
    }
    let rhs = -m.s();
    let p = solve_lyapunov_schur(&u, &schur_t, a.frobenius_norm(), &rhs).map_err(not_applicable_as(METHOD))?;
    let f = mat_exp(a, t).map_err(overflow_as(METHOD))?;
    let q = &p - &p.congruence(&f);

    let mut diag = Diagnostics::default();
    let res = sylvester_residual(a, &a.transpose(), &rhs, &p);
    diag.set("stationary_residual", res);
    diag.set("sylvester_residual", res);
    finish(m, METHOD, f, q, t, diag)
}

/// Solves `A·Q + Q·Aᵀ = −(S − F·S·Fᵀ)` directly for `Q`.
///
/// `A` need not be stable, but no two eigenvalues may sum to zero, which
/// rules out integrators and mirrored poles.
pub fn discretize_lyap_q<T: Real>(m: &ContinuousModel<T>, t: T) -> Result<MethodReport<T>, DiscretizeError> {
    const METHOD: Method = Method::LyapQ;
    check_time(t)?;
    if t == T::zero() {
        return Ok(zero_step_report(m, METHOD));
    }
    let a = m.a();
    let (u, schur_t, _) = schur_without_integrators(a, METHOD)?;
    let f = mat_exp(a, t).map_err(overflow_as(METHOD))?;
    let v = m.s() - &m.s().congruence(&f);
    let rhs = -&v;
    let q = solve_lyapunov_schur(&u, &schur_t, a.frobenius_norm(), &rhs).map_err(not_applicable_as(METHOD))?;

    let mut diag = Diagnostics::default();
    diag.set("sylvester_residual", sylvester_residual(a, &a.transpose(), &rhs, &q));
    finish(m, METHOD, f, q, t, diag)
}

/// `Σᵢ Σⱼ tⁱ⁺ʲ⁺¹ / (i!·j!·(i+j+1)) · Nⁱ·S·(Nʲ)ᵀ` for `i, j < p`.
///
/// This is the exact covariance of a nilpotent block `N` of order `p`: the
/// exponential series terminates, so the integral is a polynomial in `t`.
pub fn q_nilpotent<T: Real>(a22: &Matrix<T>, s22: &Matrix<T>, t: T) -> Result<Matrix<T>, DiscretizeError> {
    q_nilpotent_tol(a22, s22, t, default_zero_tolerance(a22))
}

pub(crate) fn q_nilpotent_tol<T: Real>(
    a22: &Matrix<T>,
    s22: &Matrix<T>,
    t: T,
    tau_zero: T,
) -> Result<Matrix<T>, DiscretizeError> {
    let p = a22.rows();
    if !a22.is_square() || s22.rows() != p || s22.cols() != p {
        return Err(LinalgError::Dimension {
            op: "q_nilpotent",
            detail: format!("a22 {}x{}, s22 {}x{}", a22.rows(), a22.cols(), s22.rows(), s22.cols()),
        }
        .into());
    }
    check_time(t)?;

    // powers[i] = Nⁱ; Nᵖ only feeds the nilpotency check
    let mut powers = vec![Matrix::identity(p)];
    for i in 1..=p {
        powers.push(&powers[i - 1] * a22);
    }
    // an eigenvalue of size τ leaves ‖Nᵖ‖ ≈ p·τ·‖N‖ᵖ⁻¹
    let norm = a22.frobenius_norm().max(tau_zero);
    let bound = T::of(p as f64) * tau_zero * norm.powi(p as i32 - 1);
    let residual = powers[p].frobenius_norm();
    if residual > bound {
        return Err(DiscretizeError::NotNilpotent { residual: residual.as_f64(), bound: bound.as_f64() });
    }

    let mut fact = vec![T::one(); p];
    for i in 1..p {
        fact[i] = fact[i - 1] * T::of(i as f64);
    }
    // left[i] = Nⁱ·S
    let left: Vec<Matrix<T>> = powers[..p].iter().map(|n_i| n_i * s22).collect();
    let mut q = Matrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            let e = i + j + 1;
            let c = t.powi(e as i32) / (fact[i] * fact[j] * T::of(e as f64));
            q = &q + &left[i].mul_transpose(&powers[j]).scale(c);
        }
    }
    Ok(q.symmetrize())
}

/// The ordered-Schur method with the zero threshold chosen automatically.
pub fn discretize_proposed<T: Real>(m: &ContinuousModel<T>, t: T) -> Result<MethodReport<T>, DiscretizeError> {
    discretize_proposed_with(m, t, None)
}

/// Moves the eigenvalues with `|λ| ≤ tau_zero` (default
/// [`default_zero_tolerance`]) to a trailing nilpotent block `Ã₂₂` by an
/// orthogonal similarity, integrates that block in closed form and recovers
/// the coupled blocks from one Sylvester and one Lyapunov equation.
///
/// Spectra containing a non-zero pair `λ, −λ` are refused.
pub fn discretize_proposed_with<T: Real>(
    m: &ContinuousModel<T>,
    t: T,
    tau_zero: Option<T>,
) -> Result<MethodReport<T>, DiscretizeError> {
    const METHOD: Method = Method::Proposed;
    check_time(t)?;
    if t == T::zero() {
        return Ok(zero_step_report(m, METHOD));
    }
    let n = m.dim();
    let tau = tau_zero.unwrap_or_else(|| default_zero_tolerance(m.a()));
    let (u0, t0) = real_schur(m.a())?;
    let schur = order_schur_zeros_last(&u0, &t0, tau)?;
    let k = schur.split;
    let p = n - k;
    let at = &schur.t;
    let a11 = at.block(0, 0, k, k);

    let ev11 = schur_eigenvalues(&a11);
    let threshold = singularity_threshold(a11.frobenius_norm(), a11.frobenius_norm());
    for (i, &la) in ev11.iter().enumerate() {
        for &lb in &ev11[i..] {
            let gap = (la + lb).norm();
            if gap <= threshold {
                return Err(DiscretizeError::UnsupportedSpectrum {
                    lambda_a: Complex64::new(la.re.as_f64(), la.im.as_f64()),
                    lambda_b: Complex64::new(lb.re.as_f64(), lb.im.as_f64()),
                    gap: gap.as_f64(),
                    threshold: threshold.as_f64(),
                });
            }
        }
    }

    // the inverse is formed explicitly rather than taken as Uᵀ
    let u_inv = inverse(&schur.u)?;
    let st = m.s().congruence(&u_inv);
    let ft = mat_exp(at, t).map_err(overflow_as(METHOD))?;
    let vt = &st - &st.congruence(&ft);

    let mut qt = Matrix::zeros(n, n);
    let mut diag = Diagnostics::default();
    diag.set("split", k as f64);
    diag.set("integrators", p as f64);

    let q22 = if p > 0 {
        let q22 = q_nilpotent_tol(&at.block(k, k, p, p), &st.block(k, k, p, p), t, tau)?;
        qt.set_block(k, k, &q22);
        Some(q22)
    } else {
        None
    };

    if k > 0 {
        let mut worst = 0.0f64;
        let mut rhs = -&vt.block(0, 0, k, k);
        if let Some(q22) = &q22 {
            let a12 = at.block(0, k, k, p);
            let a22t = at.block(k, k, p, p).transpose();
            let rhs12 = &(-&vt.block(0, k, k, p)) - &(&a12 * q22);
            let q12 = solve_sylvester(&a11, &a22t, &rhs12).map_err(overflow_as(METHOD))?;
            worst = worst.max(sylvester_residual(&a11, &a22t, &rhs12, &q12));
            let coupling = a12.mul_transpose(&q12);
            rhs = &(&rhs - &coupling) - &coupling.transpose();
            qt.set_block(0, k, &q12);
            qt.set_block(k, 0, &q12.transpose());
        }
        let q11 = solve_lyapunov(&a11, &rhs).map_err(overflow_as(METHOD))?;
        worst = worst.max(sylvester_residual(&a11, &a11.transpose(), &rhs, &q11));
        qt.set_block(0, 0, &q11);
        diag.set("sylvester_residual", worst);
    }

    let f = &(&schur.u * &ft) * &u_inv;
    let q = qt.congruence(&schur.u);
    finish(m, METHOD, f, q, t, diag)
}

/// Van Loan's method: `e^{H·t}` with `H = [[A, S], [0, −Aᵀ]]` holds `F` in
/// its leading block and `Q·F⁻ᵀ` in its upper-right block.
///
/// The `−Aᵀ` block grows like `e^{|λ|·t}` for stable `A`, which overflows
/// for long steps.
pub fn discretize_vanloan<T: Real>(m: &ContinuousModel<T>, t: T) -> Result<MethodReport<T>, DiscretizeError> {
    const METHOD: Method = Method::VanLoan;
    check_time(t)?;
    if t == T::zero() {
        return Ok(zero_step_report(m, METHOD));
    }
    let n = m.dim();
    let mut h = Matrix::zeros(2 * n, 2 * n);
    h.set_block(0, 0, m.a());
    h.set_block(0, n, m.s());
    h.set_block(n, n, &(-&m.a().transpose()));
    let e = mat_exp(&h, t).map_err(overflow_as(METHOD))?;
    let f = e.block(0, 0, n, n);
    let q = e.block(0, n, n, n).mul_transpose(&f);
    finish(m, METHOD, f, q, t, Diagnostics::default())
}

/// `(1/t)·Ḡ·S·Ḡᵀ` with `Ḡ = ∫₀ᵗ e^{Aτ} dτ`, the covariance obtained when the
/// noise is held constant over the step.
///
/// `Ḡ` is the upper-right block of `exp([[A, I], [0, 0]]·t)`. Returns zero at `t = 0`.
pub fn naive_q_a<T: Real>(m: &ContinuousModel<T>, t: T) -> Result<Matrix<T>, DiscretizeError> {
    check_time(t)?;
    let n = m.dim();
    if t == T::zero() {
        return Ok(Matrix::zeros(n, n));
    }
    let mut aug = Matrix::zeros(2 * n, 2 * n);
    aug.set_block(0, 0, m.a());
    aug.set_block(0, n, &Matrix::identity(n));
    let e = mat_exp(&aug, t).map_err(overflow_as(Method::NaiveA))?;
    let g = e.block(0, n, n, n);
    Ok(m.s().congruence(&g).scale(T::one() / t))
}

/// `t·S`, the covariance obtained by rescaling the intensity.
pub fn naive_q_b<T: Real>(m: &ContinuousModel<T>, t: T) -> Matrix<T> {
    m.s().scale(t)
}

/// Runs `method` on `m` for a step of length `t`.
///
/// The oracle always integrates in `f64` and rounds the result to `T`.
pub fn discretize<T: Real>(m: &ContinuousModel<T>, method: Method, t: T) -> Result<MethodReport<T>, DiscretizeError> {
    match method {
        Method::LyapP => discretize_lyap_p(m, t),
        Method::LyapQ => discretize_lyap_q(m, t),
        Method::Proposed => discretize_proposed(m, t),
        Method::VanLoan => discretize_vanloan(m, t),
        Method::NaiveA | Method::NaiveB | Method::Oracle => {
            check_time(t)?;
            if t == T::zero() {
                return Ok(zero_step_report(m, method));
            }
            let f = mat_exp(m.a(), t).map_err(overflow_as(method))?;
            let q = match method {
                Method::NaiveA => naive_q_a(m, t)?,
                Method::NaiveB => naive_q_b(m, t),
                _ => q_oracle(&m.cast::<f64>(), t.as_f64(), DEFAULT_ORACLE_TOL)?.cast(),
            };
            finish(m, method, f, q, t, Diagnostics::default())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: f64, s: f64) -> ContinuousModel<f64> {
        ContinuousModel::new(Matrix::from_rows(&[[a]]), Matrix::from_rows(&[[s]])).unwrap()
    }

    fn constant_velocity() -> ContinuousModel<f64> {
        ContinuousModel::new(Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]), Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0]]))
            .unwrap()
    }

    fn close(x: &Matrix<f64>, y: &Matrix<f64>, rel: f64) -> bool {
        (x - y).max_abs() <= rel * y.max_abs().max(1e-300)
    }

    #[test]
    fn scalar_stable_all_exact_methods() {
        let want = Matrix::from_rows(&[[1.0 - (-2.0f64).exp()]]);
        let m = scalar(-1.0, 2.0);
        for method in Method::EXACT {
            let r = discretize(&m, method, 1.0).unwrap();
            assert!(close(r.model.q(), &want, 1e-14), "{method}: {:?}", r.model.q());
        }
        assert!((want[(0, 0)] - 0.8646647167633873).abs() < 1e-15);
    }

    #[test]
    fn lyap_q_handles_unstable_scalar() {
        let r = discretize_lyap_q(&scalar(1.0, 2.0), 1.0).unwrap();
        let want = 2f64.exp() - 1.0;
        assert!((r.model.q()[(0, 0)] - want).abs() <= 1e-14 * want);
        assert!(matches!(
            discretize_lyap_p(&scalar(1.0, 2.0), 1.0),
            Err(DiscretizeError::NotApplicable { reason: Obstruction::Unstable { .. }, .. })
        ));
    }

    #[test]
    fn decoupled_diagonal() {
        let m = ContinuousModel::new(Matrix::diag(&[-1.0, -2.0]), Matrix::identity(2)).unwrap();
        let want = Matrix::diag(&[(1.0 - (-1.0f64).exp()) / 2.0, (1.0 - (-2.0f64).exp()) / 4.0]);
        let r = discretize_lyap_p(&m, 0.5).unwrap();
        assert!(close(r.model.q(), &want, 1e-14));
    }

    #[test]
    fn zero_step_is_exact_for_every_method() {
        let m = constant_velocity();
        for method in Method::ALL {
            if let Ok(r) = discretize(&m, method, 0.0) {
                assert_eq!(r.model.f(), &Matrix::identity(2), "{method}");
                assert_eq!(r.model.q(), &Matrix::zeros(2, 2), "{method}");
            }
        }
    }

    #[test]
    fn negative_time_rejected() {
        assert!(matches!(discretize_vanloan(&scalar(-1.0, 1.0), -1.0), Err(DiscretizeError::InvalidTime(_))));
    }

    #[test]
    fn nilpotent_single_integrator() {
        let q = q_nilpotent(&Matrix::from_rows(&[[0.0f64]]), &Matrix::from_rows(&[[0.7]]), 3.0).unwrap();
        assert!((q[(0, 0)] - 2.1).abs() < 1e-15);
    }

    #[test]
    fn nilpotent_constant_velocity() {
        let m = constant_velocity();
        for t in [1.0f64, 2.0, 10.0] {
            let q = q_nilpotent(m.a(), m.s(), t).unwrap();
            let want = Matrix::from_rows(&[[t.powi(3) / 3.0, t * t / 2.0], [t * t / 2.0, t]]);
            assert!(close(&q, &want, 1e-15), "t={t}");
        }
        let q = q_nilpotent(m.a(), m.s(), 2.0).unwrap();
        assert_eq!(q, Matrix::from_rows(&[[8.0 / 3.0, 2.0], [2.0, 2.0]]));
    }

    #[test]
    fn nilpotent_rejects_stable_block() {
        let r = q_nilpotent(&Matrix::from_rows(&[[-1.0]]), &Matrix::from_rows(&[[1.0]]), 1.0);
        assert!(matches!(r, Err(DiscretizeError::NotNilpotent { .. })));
    }

    #[test]
    fn proposed_constant_velocity() {
        let m = constant_velocity();
        let r = discretize_proposed(&m, 1.0).unwrap();
        let want = Matrix::from_rows(&[[1.0 / 3.0, 0.5], [0.5, 1.0]]);
        assert!(close(r.model.q(), &want, 1e-14), "{:?}", r.model.q());
        assert!(close(r.model.f(), &Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]), 1e-14));
        assert_eq!(r.diagnostics.get("integrators"), Some(Diagnostic::Value(2.0)));
        assert_eq!(r.diagnostics.get("sylvester_residual"), Some(Diagnostic::NotApplicable));
    }

    #[test]
    fn proposed_mixed_matches_closed_form() {
        // A = [[−1, 1], [0, 0]], S = I: Q has a closed form by direct integration
        let m = ContinuousModel::new(Matrix::from_rows(&[[-1.0, 1.0], [0.0, 0.0]]), Matrix::identity(2)).unwrap();
        let t = 1.0f64;
        let e1 = (-t).exp();
        let e2 = (-2.0 * t).exp();
        // e^{Aτ} = [[e^{−τ}, 1 − e^{−τ}], [0, 1]]
        let q11 = (1.0 - e2) / 2.0 + t - 2.0 * (1.0 - e1) + (1.0 - e2) / 2.0;
        let q12 = t - (1.0 - e1);
        let want = Matrix::from_rows(&[[q11, q12], [q12, t]]);
        let r = discretize_proposed(&m, t).unwrap();
        assert!(close(r.model.q(), &want, 1e-12), "{:?} vs {want:?}", r.model.q());
        assert_eq!(r.diagnostics.get("split"), Some(Diagnostic::Value(1.0)));
    }

    #[test]
    fn proposed_refuses_mirrored_poles() {
        let m = ContinuousModel::new(Matrix::diag(&[-1.0, 1.0]), Matrix::identity(2)).unwrap();
        assert!(matches!(discretize_proposed(&m, 1.0), Err(DiscretizeError::UnsupportedSpectrum { .. })));
        assert!(discretize_lyap_q(&m, 1.0).unwrap_err().is_not_applicable());
        assert!(discretize_vanloan(&m, 1.0).is_ok());
    }

    #[test]
    fn lyapunov_methods_refuse_integrators() {
        let m = constant_velocity();
        for method in [Method::LyapP, Method::LyapQ] {
            let err = discretize(&m, method, 1.0).unwrap_err();
            assert!(err.is_not_applicable(), "{err}");
            assert!(err.to_string().contains("eigenvalue-sum singularity"), "{err}");
        }
    }

    #[test]
    fn vanloan_constant_velocity() {
        let r = discretize_vanloan(&constant_velocity(), 10.0).unwrap();
        let want = Matrix::from_rows(&[[1000.0 / 3.0, 50.0], [50.0, 10.0]]);
        assert!(close(r.model.q(), &want, 1e-13));
    }

    #[test]
    fn vanloan_overflows_in_single_precision() {
        let m = scalar(-1.0, 2.0).cast::<f32>();
        let err = discretize_vanloan(&m, 100.0).unwrap_err();
        assert!(err.is_overflow(), "{err}");
    }

    #[test]
    fn naive_examples() {
        let q = naive_q_a(&scalar(0.0, 0.4), 5.0f64).unwrap();
        assert!((q[(0, 0)] - 2.0).abs() < 1e-14);
        let q = naive_q_a(&scalar(-1.0, 2.0), 1.0).unwrap();
        let g = 1.0 - (-1.0f64).exp();
        assert!((q[(0, 0)] - 2.0 * g * g).abs() < 1e-15);
        assert!((q[(0, 0)] - 0.7991528).abs() < 1e-6);
        let q = naive_q_a(&constant_velocity(), 1.0).unwrap();
        assert!(close(&q, &Matrix::from_rows(&[[0.25, 0.5], [0.5, 1.0]]), 1e-15));

        let m = ContinuousModel::new(Matrix::<f64>::zeros(2, 2), Matrix::identity(2)).unwrap();
        assert_eq!(naive_q_b(&m, 3.0), Matrix::diag(&[3.0, 3.0]));
        let m = ContinuousModel::new(Matrix::<f64>::identity(2), Matrix::zeros(2, 2)).unwrap();
        assert_eq!(naive_q_b(&m, 7.0), Matrix::zeros(2, 2));
        assert_eq!(naive_q_b(&constant_velocity(), 2.0), Matrix::diag(&[0.0, 2.0]));
    }

    #[test]
    fn diagnostics_always_carry_residual_keys() {
        for method in Method::ALL {
            if let Ok(r) = discretize(&scalar(-0.5, 1.0), method, 0.3) {
                assert!(r.diagnostics.get("sylvester_residual").is_some(), "{method}");
                assert!(r.diagnostics.get("lemma2_residual").is_some(), "{method}");
            }
        }
    }
}
