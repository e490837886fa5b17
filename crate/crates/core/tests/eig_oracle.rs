//! Exact-diagonalization oracle checks: frozen eigenvalues derived by
//! independent block diagonalization, Taylor-series cross-checks of the
//! matrix exponential, and spectrum invariance under frame conjugation.

use num_complex::Complex64;
use specfind_core::*;

/// Eigenvalues of the real symmetric 2x2 block [[a, c], [c, b]].
fn block_eigs(a: f64, b: f64, c: f64) -> (f64, f64) {
    let avg = (a + b) / 2.0;
    let disc = ((a - b) / 2.0).powi(2) + c * c;
    (avg - disc.sqrt(), avg + disc.sqrt())
}

#[test]
fn frozen_spectrum_of_two_fields_plus_xx() {
    // H = sigma_z(0) + sigma_z(1) + sigma_x(0) sigma_x(1).
    // In the computational basis this splits into two 2x2 blocks:
    //   span{|00>, |11>}: [[2, 1], [1, -2]]  ->  +-sqrt(5)
    //   span{|01>, |10>}: [[0, 1], [1,  0]]  ->  +-1
    let (lo1, hi1) = block_eigs(2.0, -2.0, 1.0);
    let (lo2, hi2) = block_eigs(0.0, 0.0, 1.0);
    let s5 = 5f64.sqrt();
    assert!((lo1 + s5).abs() < 1e-15 && (hi1 - s5).abs() < 1e-15);
    assert!((lo2 + 1.0).abs() < 1e-15 && (hi2 - 1.0).abs() < 1e-15);
    let frozen = [-s5, -1.0, 1.0, s5];

    let mut h = PairHamiltonian::zero(2).unwrap();
    h.set_field(0, PauliAxis::Z, 1.0).unwrap();
    h.set_field(1, PauliAxis::Z, 1.0).unwrap();
    h.set_coupling(0, 1, PauliAxis::X, PauliAxis::X, 1.0)
        .unwrap();
    let (values, vectors) = hermitian_eig(&h.to_dense()).unwrap();
    for (got, want) in values.iter().zip(frozen) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
    assert!(vectors.is_unitary(1e-10));
}

#[test]
fn eigensolver_round_trip_up_to_dim_64() {
    for (n, seed) in [(2usize, 1u64), (3, 2), (4, 3), (5, 4), (6, 5)] {
        let h = PairHamiltonian::random(n, seed, 1.0).unwrap();
        let a = h.to_dense();
        let (values, vectors) = hermitian_eig(&a).unwrap();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
        assert!(vectors.unitary_deviation() < 1e-10);
        // V diag(lambda) V† must rebuild A
        let dim = a.dim();
        let mut rebuilt = DenseOperator::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (idx, &lambda) in values.iter().enumerate() {
                    acc += vectors.at(i, idx) * lambda * vectors.at(j, idx).conj();
                }
                rebuilt.set(i, j, acc);
            }
        }
        assert!(rebuilt.sub(&a).frobenius_norm() < 1e-9, "dim {dim}");
    }
}

/// Independent route: 20-term Taylor series of exp(-i A t).
fn taylor_expm(a: &DenseOperator, t: f64) -> DenseOperator {
    let dim = a.dim();
    let x = a.scale(Complex64::new(0.0, -t));
    let mut term = DenseOperator::identity(dim);
    let mut sum = DenseOperator::identity(dim);
    for k in 1..=20 {
        term = term.mul(&x).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    sum
}

#[test]
fn expm_matches_taylor_series_below_unit_norm() {
    for seed in [3u64, 8, 21] {
        let h = PairHamiltonian::random(3, seed, 1.0).unwrap();
        let a = h.to_dense();
        let t = 0.9 / spectral_norm(&a);
        let via_eig = expm_i(&a, t).unwrap();
        let via_taylor = taylor_expm(&a, t);
        assert!(via_eig.sub(&via_taylor).max_abs() < 1e-8);
        assert!(via_eig.is_unitary(1e-10));
        // group property
        let back = expm_i(&a, -t).unwrap();
        assert!(
            via_eig
                .mul(&back)
                .sub(&DenseOperator::identity(a.dim()))
                .max_abs()
                < 1e-10
        );
    }
}

#[test]
fn expm_eigenphases_match_spectrum() {
    let h = PairHamiltonian::random(2, 17, 1.0).unwrap();
    let a = h.to_dense();
    let t = 0.31;
    let (values, vectors) = hermitian_eig(&a).unwrap();
    let u = expm_i(&a, t).unwrap();
    // each eigenvector of A is an eigenvector of U with phase e^{-i lambda t}
    for (idx, &lambda) in values.iter().enumerate() {
        let col: Vec<Complex64> = (0..a.dim()).map(|r| vectors.at(r, idx)).collect();
        let image = u.apply(&col);
        let phase = Complex64::from_polar(1.0, -lambda * t);
        for (im, c) in image.iter().zip(&col) {
            assert!((im - phase * c).norm() < 1e-9);
        }
    }
}

#[test]
fn conjugation_preserves_spectrum_and_matches_dense() {
    let h = PairHamiltonian::random(3, 12, 1.0).unwrap();
    let frame = PauliString::from_pairs(3, &[(0, PauliAxis::Y), (2, PauliAxis::X)]).unwrap();
    let conj = h.conjugate(&frame).unwrap();

    let v = DenseOperator::embed(&frame);
    let dense_route = v.mul(&h.to_dense()).mul(&v.dagger());
    assert!(conj.to_dense().sub(&dense_route).max_abs() < 1e-12);

    let (original, _) = hermitian_eig(&h.to_dense()).unwrap();
    let (conjugated, _) = hermitian_eig(&conj.to_dense()).unwrap();
    for (a, b) in original.iter().zip(&conjugated) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn spread_bound_dominates_oracle_spread() {
    for seed in [1u64, 5, 9] {
        let h = PairHamiltonian::random(3, seed, 1.0).unwrap();
        let (values, _) = hermitian_eig(&h.to_dense()).unwrap();
        let spread = values.last().unwrap() - values.first().unwrap();
        assert!(h.spread_bound() >= spread);
    }
}

#[test]
fn random_spectrum_is_reproducible() {
    let a = PairHamiltonian::random(3, 1, 1.0).unwrap();
    let b = PairHamiltonian::random(3, 1, 1.0).unwrap();
    let (va, _) = hermitian_eig(&a.to_dense()).unwrap();
    let (vb, _) = hermitian_eig(&b.to_dense()).unwrap();
    assert_eq!(va, vb);
}

/// Dense random Hermitian matrix (arbitrary dimension, full complex entries).
fn random_hermitian(dim: usize, seed: u64) -> DenseOperator {
    let mut rng = specfind_core::rng::SplitMix64::new(seed);
    let mut b = DenseOperator::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            b.set(
                i,
                j,
                Complex64::new(rng.next_symmetric(1.0), rng.next_symmetric(1.0)),
            );
        }
    }
    b.add(&b.dagger()).scale_re(0.5)
}

#[test]
fn eigensolver_handles_general_and_non_dyadic_dimensions() {
    for (dim, seed) in [(3usize, 1u64), (5, 2), (17, 3)] {
        let a = random_hermitian(dim, seed);
        let (values, vectors) = hermitian_eig(&a).unwrap();
        assert!(vectors.unitary_deviation() < 1e-10);
        let mut rebuilt = DenseOperator::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (idx, &lambda) in values.iter().enumerate() {
                    acc += vectors.at(i, idx) * lambda * vectors.at(j, idx).conj();
                }
                rebuilt.set(i, j, acc);
            }
        }
        assert!(rebuilt.sub(&a).frobenius_norm() < 1e-9, "dim {dim}");
    }
}

#[test]
fn eigensolver_handles_degenerate_spectra() {
    // exactly degenerate diagonal block plus a weak coupling
    let c = |re: f64| Complex64::new(re, 0.0);
    let z = c(0.0);
    let a = DenseOperator::from_rows(&[
        vec![c(1.0), z, z, c(1e-3)],
        vec![z, c(1.0), z, z],
        vec![z, z, c(1.0), z],
        vec![c(1e-3), z, z, c(2.0)],
    ]);
    let (values, vectors) = hermitian_eig(&a).unwrap();
    assert!(vectors.unitary_deviation() < 1e-10);
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
    // two exactly degenerate middle eigenvalues survive
    assert!((values[1] - 1.0).abs() < 1e-12);
    assert!((values[2] - 1.0).abs() < 1e-12);

    // the identity and the zero matrix are fixed points
    let (values, _) = hermitian_eig(&DenseOperator::identity(6)).unwrap();
    assert!(values.iter().all(|v| (v - 1.0).abs() < 1e-14));
    let (values, _) = hermitian_eig(&DenseOperator::zeros(6)).unwrap();
    assert!(values.iter().all(|v| v.abs() < 1e-14));
}
