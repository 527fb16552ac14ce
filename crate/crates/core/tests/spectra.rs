//! Spectral routines against dense eigensolvers on `bcirc` and circulants.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use tubal::random;
use tubal::spectra::{
    aligned_eigenpairs, extreme_tubular_eigenvalues, hermitian_decomposition, hermitian_ordered_spectrum,
    kantorovich_slack, positive_definite_by_definition, positive_definite_by_slices, positive_definite_by_tubes,
    product_bound_slacks, rayleigh_slack, slice_spectra, t_eigenvalues, t_linear_independent, t_spectral_radius,
    tubular_eig_from_selection, tubular_spectral_radius, weyl_slack,
};
use tubal::{Tensor3, Tubular};

fn dense_eigenvalues(m: DMatrix<C64>) -> Vec<C64> {
    let (_, t) = Schur::new(m).unpack();
    t.diagonal().iter().copied().collect()
}

/// Largest distance after greedily matching each element of `a` to its
/// nearest unused element of `b`.
fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut pool = b.to_vec();
    let mut worst = 0.0f64;
    for x in a {
        let (i, d) = pool
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|u, v| u.1.total_cmp(&v.1))
            .unwrap();
        worst = worst.max(d);
        pool.swap_remove(i);
    }
    worst
}

fn components(t: &Tubular) -> Vec<C64> {
    t.fourier_components()
}

#[test]
fn t_eigenvalues_match_dense_bcirc() {
    let mut r = random::rng(3);
    for (n, p) in [(3, 2), (2, 5), (4, 4), (1, 6)] {
        for complex in [false, true] {
            let a = if complex {
                random::complex_normal_tensor(&mut r, n, n, p)
            } else {
                random::real_normal(&mut r, n, n, p)
            };
            let oracle = dense_eigenvalues(a.bcirc_explicit().unwrap());
            let scale = oracle.iter().fold(1.0f64, |m, z| m.max(z.norm()));
            let d = multiset_distance(&t_eigenvalues(&a).unwrap(), &oracle);
            assert!(d <= 1e-8 * scale, "n={n} p={p}: {d:e}");
        }
    }
}

#[test]
fn single_tube_eigenvalues_are_circulant_eigenvalues() {
    let v = Tubular::from_real(&[1.0, -2.0, 0.5, 3.0]);
    let a = Tensor3::from_fn(1, 1, 4, |_, _, k| v.entries()[k]);
    let oracle = dense_eigenvalues(v.circ_matrix());
    assert!(multiset_distance(&t_eigenvalues(&a).unwrap(), &oracle) < 1e-12);
    let rho = tubular_spectral_radius(&a).unwrap();
    for (got, d) in components(&rho).iter().zip(v.fourier_components()) {
        assert!((got.re - d.norm()).abs() < 1e-12 && got.im.abs() < 1e-12);
    }
    let max = oracle.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    assert!((t_spectral_radius(&a).unwrap() - max).abs() < 1e-12);
}

#[test]
fn hermitian_minimum_selection_takes_smallest_slice_eigenvalues() {
    let mut r = random::rng(8);
    let a = random::hermitian(&mut r, 2, 2);
    let pair = tubular_eig_from_selection(&a, &[0, 0]).unwrap();
    let fa = a.fourier();
    for k in 0..2 {
        let s = fa.slice(k);
        let h = (s + s.adjoint()).scale(0.5);
        let min = SymmetricEigen::new(h).eigenvalues.min();
        assert!((components(&pair.lambda)[k].re - min).abs() < 1e-12);
    }
    assert!(pair.residual < 1e-12);
}

#[test]
fn f_diagonal_tensor_eigenvalues_are_its_diagonal_tubes() {
    let mut r = random::rng(4);
    let (n, p) = (3, 4);
    let tubes: Vec<Tubular> = (0..n).map(|_| random::hermitian_tube(&mut r, p)).collect();
    let a = Tensor3::from_fn(n, n, p, |i, j, k| if i == j { tubes[i].entries()[k] } else { C64::default() });
    // The aligned selection sorts by slice, so compare against sorted tube components.
    let spec = slice_spectra(&a).unwrap();
    for k in 0..p {
        let mut expect: Vec<f64> = tubes.iter().map(|t| t.fourier_components()[k].re).collect();
        expect.sort_by(f64::total_cmp);
        for (j, e) in expect.iter().enumerate() {
            assert!((spec.values(k)[j].re - e).abs() < 1e-12);
        }
    }
    // With one tube the selection (j,…,j) recovers that tube exactly.
    let single = Tensor3::from_fn(1, 1, p, |_, _, k| tubes[0].entries()[k]);
    let pair = tubular_eig_from_selection(&single, &vec![0; p]).unwrap();
    assert!((&pair.lambda - &tubes[0]).norm() < 1e-12);
}

#[test]
fn dtensor_of_hpd_tube_has_that_tube_n_times() {
    let mut r = random::rng(9);
    let v = random::hpd_tube(&mut r, 5, 0.5, 3.0).into_real();
    let a = v.dtensor(3);
    for pair in hermitian_ordered_spectrum(&a).unwrap() {
        assert!((&pair.lambda - &v).norm() < 1e-12);
    }
    assert!(positive_definite_by_tubes(&a).unwrap());
}

#[test]
fn eigentensors_of_hermitian_tensor_are_independent() {
    let mut r = random::rng(12);
    let a = random::hermitian(&mut r, 4, 3);
    let xs: Vec<Tensor3> = hermitian_ordered_spectrum(&a).unwrap().into_iter().map(|p| p.x).collect();
    assert!(t_linear_independent(&xs).unwrap().independent);
}

#[test]
fn independence_examples() {
    let mut r = random::rng(1);
    let x = random::complex_normal_tensor(&mut r, 3, 1, 4);
    assert!(t_linear_independent(std::slice::from_ref(&x)).unwrap().independent);
    let a = random::hpd_tube(&mut r, 4, 1.0, 2.0);
    let report = t_linear_independent(&[x.clone(), x.mul_tube(&a).unwrap()]).unwrap();
    assert!(!report.independent);
}

#[test]
fn definiteness_detectors_agree() {
    let mut r = random::rng(21);
    for t in 0..40 {
        let n = 1 + t % 4;
        let p = 1 + t % 5;
        let a = random::hermitian(&mut r, n, p);
        let shift = random::uniform(&mut r, -2.0, 4.0);
        let a = &a + &Tensor3::identity(n, p).scale_real(shift);
        let d = positive_definite_by_definition(&a).unwrap();
        assert_eq!(d, positive_definite_by_slices(&a).unwrap());
        assert_eq!(d, positive_definite_by_tubes(&a).unwrap());
    }
}

#[test]
fn hermitian_decomposition_of_random_tensor() {
    let mut r = random::rng(30);
    let a = random::hermitian(&mut r, 3, 3);
    let dec = hermitian_decomposition(&a).unwrap();
    assert!(dec.reconstruction_error(&a).unwrap() <= 1e-10);
    assert!(dec.unitarity_error().unwrap() <= 1e-10);
    let (lo, hi) = extreme_tubular_eigenvalues(&a).unwrap();
    assert!((&lo - dec.lambda_min()).norm() < 1e-12);
    assert!((&hi - dec.lambda_max()).norm() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn aligned_eigenpairs_have_small_residual(n in 1usize..5, p in 1usize..6, seed in any::<u64>(), complex in any::<bool>()) {
        let mut r = random::rng(seed);
        let a = if complex { random::complex_normal_tensor(&mut r, n, n, p) } else { random::real_normal(&mut r, n, n, p) };
        for pair in aligned_eigenpairs(&a).unwrap() {
            if pair.defective.is_empty() {
                prop_assert!(pair.residual <= 1e-8);
            }
        }
    }

    #[test]
    fn hermitian_tubes_are_ordered(n in 1usize..6, p in 1usize..6, seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let a = random::hermitian(&mut r, n, p);
        let tubes: Vec<Vec<C64>> = hermitian_ordered_spectrum(&a).unwrap().iter().map(|e| components(&e.lambda)).collect();
        for w in tubes.windows(2) {
            for k in 0..p {
                prop_assert!(w[0][k].re <= w[1][k].re + 1e-12);
            }
        }
    }

    #[test]
    fn inequality_slacks_are_nonnegative(n in 1usize..6, p in 1usize..6, seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let a = random::hermitian(&mut r, n, p);
        let b = random::hermitian(&mut r, n, p);
        prop_assert!(weyl_slack(&a, &b).unwrap() >= -1e-10);
        let x = random::complex_normal_tensor(&mut r, n, 1, p);
        prop_assert!(rayleigh_slack(&a, &x).unwrap() >= -1e-10);
        let h = random::hpd(&mut r, n, p, 0.3);
        prop_assert!(kantorovich_slack(&h, &x).unwrap() >= -1e-10);
        let neg = random::hpd(&mut r, n, p, 0.1).scale_real(-1.0);
        let psd = random::hpsd(&mut r, n, p, 1 + (seed as usize) % n);
        prop_assert!(product_bound_slacks(&neg, &psd).unwrap().worst() >= -1e-10);
    }
}

#[test]
fn weyl_with_identities_is_tight() {
    let i = Tensor3::identity(3, 4);
    assert!(weyl_slack(&i, &i).unwrap().abs() < 1e-14);
}

#[test]
fn kantorovich_scalar_case_has_zero_slack() {
    let mut r = random::rng(2);
    let a = random::hpd(&mut r, 1, 5, 0.5);
    let x = random::complex_normal_tensor(&mut r, 1, 1, 5);
    assert!(kantorovich_slack(&a, &x).unwrap().abs() < 1e-10);
}
