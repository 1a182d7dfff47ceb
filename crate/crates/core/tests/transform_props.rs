use aluthge_core::aluthge::{
    aluthge, aluthge_matrix, check_ap_lemma, check_fixed_point_lemma, check_kernel_lemma, is_quasinormal, rank_one_aluthge, Lambda,
};
use aluthge_core::harness::{run_suite, SuiteConfig};
use aluthge_core::linalg::{psd_power, polar_decompose, CMatrix, TolerancePolicy, C64};
use aluthge_core::sampling::{SplitMix64, Sampler};
use aluthge_core::VNAlgebra;
use proptest::prelude::*;

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn lambda() -> impl Strategy<Value = Lambda> {
    (0.0f64..=1.0).prop_map(|x| Lambda::new(x).unwrap())
}

fn positive_lambda() -> impl Strategy<Value = Lambda> {
    (0.01f64..=1.0).prop_map(|x| Lambda::new(x).unwrap())
}

fn sampler(dims: &[usize], seed: u64) -> Sampler {
    Sampler::new(VNAlgebra::new(dims.to_vec()).unwrap(), seed)
}

fn profile() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..4, 1..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Δ_λ(a) against |a|^λ u |a|^{1-λ} assembled from the polar factors.
    #[test]
    fn transform_matches_polar_assembly(seed in any::<u64>(), n in 1usize..6, l in lambda()) {
        let mut s = sampler(&[2], seed);
        let a = s.gaussian_matrix(n, n);
        let p = polar_decompose(&a, &tol()).unwrap();
        let assembled = &(&psd_power(&p.modulus, l.value(), &tol()).unwrap() * &p.u)
            * &psd_power(&p.modulus, 1.0 - l.value(), &tol()).unwrap();
        let got = aluthge_matrix(&a, l, &tol()).unwrap();
        if l.value() == 0.0 {
            prop_assert_eq!(got, a);
        } else {
            prop_assert!(got.rel_dist(&assembled) < 1e-9);
        }
    }

    #[test]
    fn unitary_covariance(dims in profile(), seed in any::<u64>(), l in lambda()) {
        let mut s = sampler(&dims, seed);
        let (v, a) = (s.unitary(), s.element());
        let lhs = aluthge(&v.mul(&a).unwrap().mul(&v.adjoint()).unwrap(), l, &tol()).unwrap();
        let rhs = v.mul(&aluthge(&a, l, &tol()).unwrap()).unwrap().mul(&v.adjoint()).unwrap();
        prop_assert!(lhs.approx_eq(&rhs, &tol()));
    }

    #[test]
    fn homogeneous_under_scalars(seed in any::<u64>(), l in lambda(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let mut s = sampler(&[3], seed);
        let a = s.element();
        let c = C64::new(re, im);
        let lhs = aluthge(&a.scale(c), l, &tol()).unwrap();
        let rhs = aluthge(&a, l, &tol()).unwrap().scale(c);
        prop_assert!(lhs.sub(&rhs).unwrap().fro_norm() <= 1e-9 * (1.0 + rhs.fro_norm()));
    }

    #[test]
    fn quasinormal_elements_are_fixed(dims in profile(), seed in any::<u64>(), l in positive_lambda()) {
        let mut s = sampler(&dims, seed);
        let a = s.quasinormal_element();
        prop_assert!(is_quasinormal(&a, &tol()));
        prop_assert!(aluthge(&a, l, &tol()).unwrap().approx_eq(&a, &tol()));
        let c = check_fixed_point_lemma(&a, l, &tol()).unwrap();
        prop_assert!(c.holds);
    }

    #[test]
    fn generic_elements_move(seed in any::<u64>(), l in positive_lambda()) {
        let mut s = sampler(&[3], seed);
        let a = s.element();
        prop_assert!(!is_quasinormal(&a, &tol()));
        prop_assert!(!aluthge(&a, l, &tol()).unwrap().approx_eq(&a, &tol()));
        prop_assert!(check_fixed_point_lemma(&a, l, &tol()).unwrap().holds);
    }

    #[test]
    fn nilpotents_vanish(dims in profile(), seed in any::<u64>(), l in positive_lambda()) {
        let mut s = sampler(&dims, seed);
        let a = s.nilpotent();
        prop_assert!(aluthge(&a, l, &tol()).unwrap().fro_norm() <= 1e-10 * a.fro_norm().max(1.0));
        prop_assert!(check_kernel_lemma(&a, l, &tol()).unwrap().holds);
    }

    #[test]
    fn ap_lemma_on_samples(dims in profile(), seed in any::<u64>(), l in positive_lambda()) {
        let mut s = sampler(&dims, seed);
        let (a, p) = (s.element(), s.projection());
        prop_assert!(check_ap_lemma(&a, &p, l, &tol()).unwrap().holds);
    }

    #[test]
    fn rank_one_closed_form(seed in any::<u64>(), n in 2usize..6, l in positive_lambda()) {
        let mut rng = SplitMix64::new(seed);
        let x: Vec<C64> = (0..n).map(|_| rng.complex_gaussian()).collect();
        let y: Vec<C64> = (0..n).map(|_| rng.complex_gaussian()).collect();
        let general = aluthge_matrix(&CMatrix::outer(&x, &y), l, &tol()).unwrap();
        let closed = rank_one_aluthge(&x, &y, l).unwrap();
        prop_assert!(general.rel_dist(&closed) < 1e-9);
        prop_assert!(general.rel_dist(&CMatrix::outer(&x, &y)) > 1e-6 || n == 1);
    }
}

#[test]
fn worked_examples() {
    let t = tol();
    let half = Lambda::HALF;
    let idem = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
    let want = CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
    assert!(aluthge_matrix(&idem, half, &t).unwrap().rel_dist(&want) < 1e-14);
    let shift = CMatrix::unit(2, 0, 1);
    assert!(aluthge_matrix(&shift, half, &t).unwrap().fro_norm() < 1e-15);
    assert_eq!(aluthge_matrix(&shift, Lambda::ZERO, &t).unwrap(), shift);
    let one = CMatrix::identity(3);
    assert!(aluthge_matrix(&one, Lambda::ONE, &t).unwrap().rel_dist(&one) < 1e-15);
    // Δ_1(a) = |a| u lands on the same matrix here
    assert!(aluthge_matrix(&idem, Lambda::ONE, &t).unwrap().rel_dist(&want) < 1e-14);
}

#[test]
fn suite_reports_are_deterministic() {
    let config = SuiteConfig { trials_per_property: 8, ..SuiteConfig::with_seed(11) };
    let sel = vec!["all".to_string()];
    let a = run_suite(&config, &sel).unwrap();
    let b = run_suite(&config, &sel).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.all_passed(), "{}", a.reports.iter().filter(|r| !r.passed()).map(|r| r.property.as_str()).collect::<Vec<_>>().join(", "));
    let other = run_suite(&SuiteConfig { seed: 12, ..config }, &sel).unwrap();
    assert_ne!(a.to_json(), other.to_json());
}
