use noisedisc::linalg::{default_zero_tolerance, min_eigenvalue, order_schur_zeros_last, real_schur, spectral_norm};
use noisedisc::modelgen::{gen_random_system, gen_system, EnsembleSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), index in any::<u64>(), m in 0usize..6, p in 0usize..3) {
        prop_assume!(m + p > 0);
        let spec = EnsembleSpec::new(m, p, seed);
        let x = gen_system(&spec, index).unwrap();
        let y = gen_system(&spec.clone(), index).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(x.a().as_slice()), bits(y.a().as_slice()));
        prop_assert_eq!(bits(x.s().as_slice()), bits(y.s().as_slice()));
    }

    #[test]
    fn diffusion_is_normalized_psd(seed in any::<u64>(), m in 1usize..6, p in 0usize..3) {
        let s = gen_random_system(&EnsembleSpec::new(m, p, seed)).unwrap().s().clone();
        prop_assert_eq!(&s, &s.transpose());
        prop_assert!((spectral_norm(&s) - 1.0).abs() <= 1e-12);
        prop_assert!(min_eigenvalue(&s) >= -1e-14);
    }

    #[test]
    fn integrators_are_classified(seed in any::<u64>()) {
        let spec = EnsembleSpec::default();
        let a = gen_random_system(&EnsembleSpec { seed, ..spec.clone() }).unwrap().a().clone();
        let (u, t) = real_schur(&a).unwrap();
        let o = order_schur_zeros_last(&u, &t, default_zero_tolerance(&a)).unwrap();
        prop_assert_eq!(o.zero_count(), spec.p);
        // the fastest stable pole sits at real part −1
        let fastest = o.eigenvalues()[..o.split].iter().map(|l| -l.re).fold(0.0, f64::max);
        prop_assert!((fastest - 1.0).abs() <= 1e-12);
    }
}
