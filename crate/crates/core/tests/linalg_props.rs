use aluthge_core::linalg::{herm_eig, polar_decompose, psd_power, range_projection, svd, CMatrix, TolerancePolicy, C64};
use aluthge_core::sampling::Sampler;
use aluthge_core::VNAlgebra;
use proptest::prelude::*;

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn sampler(seed: u64) -> Sampler {
    Sampler::new(VNAlgebra::full(2).unwrap(), seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs_and_is_orthonormal(seed in any::<u64>(), n in 1usize..7) {
        let mut s = sampler(seed);
        let g = s.gaussian_matrix(n, n);
        let h = (&g + &g.adjoint()).scale_real(0.5);
        let e = herm_eig(&h, &tol()).unwrap();
        prop_assert!(e.reconstruct().rel_dist(&h) < 1e-12);
        let gram = &e.vectors.adjoint() * &e.vectors;
        prop_assert!(gram.rel_dist(&CMatrix::identity(n)) < 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        // trace and Frobenius norm are spectral invariants
        let tr: f64 = e.values.iter().sum();
        prop_assert!((tr - h.trace().re).abs() < 1e-10 * (1.0 + h.fro_norm()));
        let fro: f64 = e.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((fro - h.fro_norm()).abs() < 1e-10 * (1.0 + fro));
    }

    #[test]
    fn svd_matches_eigenvalues_of_gram(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6) {
        let mut s = sampler(seed);
        let m = s.gaussian_matrix(rows, cols);
        let d = svd(&m, &tol()).unwrap();
        prop_assert!(d.reconstruct().rel_dist(&m) < 1e-12);
        let gram = herm_eig(&(&m.adjoint() * &m), &tol()).unwrap();
        let scale = d.sigma[0].max(1.0);
        for (k, sv) in d.sigma.iter().enumerate() {
            let ev = gram.values[k].max(0.0).sqrt();
            prop_assert!((sv - ev).abs() < 1e-7 * scale, "{} vs {}", sv, ev);
        }
    }

    #[test]
    fn psd_powers_add(seed in any::<u64>(), n in 1usize..6, s1 in 0.0f64..0.5, s2 in 0.0f64..0.5) {
        let mut s = sampler(seed);
        let g = s.gaussian_matrix(n, n);
        let p = &g * &g.adjoint();
        let lhs = &psd_power(&p, s1, &tol()).unwrap() * &psd_power(&p, s2, &tol()).unwrap();
        let rhs = psd_power(&p, s1 + s2, &tol()).unwrap();
        prop_assert!(lhs.rel_dist(&rhs) < 1e-9);
    }

    #[test]
    fn polar_of_invertible_is_unitary(seed in any::<u64>(), n in 1usize..7) {
        let mut s = sampler(seed);
        let a = &s.gaussian_matrix(n, n) + &CMatrix::identity(n).scale_real(3.0);
        let p = polar_decompose(&a, &tol()).unwrap();
        prop_assert!((&p.u * &p.modulus).rel_dist(&a) < 1e-12);
        prop_assert!((&p.u.adjoint() * &p.u).rel_dist(&CMatrix::identity(n)) < 1e-12);
        prop_assert!((&p.modulus * &p.modulus).rel_dist(&(&a.adjoint() * &a)) < 1e-12);
    }

    #[test]
    fn polar_of_rank_deficient(seed in any::<u64>(), n in 2usize..7) {
        let mut s = sampler(seed);
        let k = 1 + (seed as usize % (n - 1));
        let a = &s.gaussian_matrix(n, k) * &s.gaussian_matrix(k, n);
        let p = polar_decompose(&a, &tol()).unwrap();
        prop_assert!((&p.u * &p.modulus).rel_dist(&a) < 1e-10);
        let support = range_projection(&p.modulus, &tol()).unwrap();
        prop_assert!((&p.u.adjoint() * &p.u).rel_dist(&support) < 1e-10);
        prop_assert!((support.trace().re - k as f64).abs() < 1e-8);
    }
}

#[test]
fn two_by_two_eigenvalues_from_the_quadratic_formula() {
    let h = CMatrix::from_rows(&[&[C64::new(2.0, 0.0), C64::new(1.0, -1.0)], &[C64::new(1.0, 1.0), C64::new(-1.0, 0.0)]]);
    // eigenvalues of [[a, b], [b̄, d]] are (a+d)/2 ± sqrt(((a-d)/2)² + |b|²)
    let mid = 0.5;
    let rad = (1.5f64.powi(2) + 2.0).sqrt();
    let e = herm_eig(&h, &tol()).unwrap();
    assert!((e.values[0] - (mid + rad)).abs() < 1e-13);
    assert!((e.values[1] - (mid - rad)).abs() < 1e-13);
}

#[test]
fn polar_of_shift_keeps_the_partial_isometry() {
    let a = CMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
    let p = polar_decompose(&a, &tol()).unwrap();
    assert!(p.modulus.rel_dist(&CMatrix::diag_real(&[0.0, 2.0])) < 1e-15);
    assert!(p.u.rel_dist(&CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])) < 1e-15);
}
