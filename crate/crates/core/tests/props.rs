//! Property tests over seeded instance families.

use proptest::prelude::*;
use specfind_core::*;

fn arb_axis() -> impl Strategy<Value = PauliAxis> {
    prop_oneof![Just(PauliAxis::X), Just(PauliAxis::Y), Just(PauliAxis::Z)]
}

fn arb_frame(n: usize) -> impl Strategy<Value = PauliString> {
    proptest::collection::vec(proptest::option::of(arb_axis()), n).prop_map(move |axes| {
        let pairs: Vec<(usize, PauliAxis)> = axes
            .into_iter()
            .enumerate()
            .filter_map(|(q, a)| a.map(|a| (q, a)))
            .collect();
        PauliString::from_pairs(n, &pairs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eigensolver_round_trip(seed in 0u64..1000, n in 2usize..5) {
        let h = PairHamiltonian::random(n, seed, 1.0).unwrap();
        let a = h.to_dense();
        let (values, vectors) = hermitian_eig(&a).unwrap();
        prop_assert!(vectors.unitary_deviation() < 1e-10);
        let dim = a.dim();
        let mut rebuilt = DenseOperator::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for (idx, &lambda) in values.iter().enumerate() {
                    acc += vectors.at(i, idx) * lambda * vectors.at(j, idx).conj();
                }
                rebuilt.set(i, j, acc);
            }
        }
        prop_assert!(rebuilt.sub(&a).frobenius_norm() < 1e-9);
    }

    #[test]
    fn symbolic_conjugation_tracks_dense(seed in 0u64..1000, frame in arb_frame(3)) {
        let h = PairHamiltonian::random(3, seed, 1.0).unwrap();
        let symbolic = h.conjugate(&frame).unwrap().to_dense();
        let v = DenseOperator::embed(&frame);
        let dense = v.mul(&h.to_dense()).mul(&v.dagger());
        prop_assert!(symbolic.sub(&dense).max_abs() < 1e-12);
    }

    #[test]
    fn conjugation_preserves_spectrum(seed in 0u64..1000, frame in arb_frame(3)) {
        let h = PairHamiltonian::random(3, seed, 1.0).unwrap();
        let (a, _) = hermitian_eig(&h.to_dense()).unwrap();
        let (b, _) = hermitian_eig(&h.conjugate(&frame).unwrap().to_dense()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn strings_commute_or_anticommute_densely(a in arb_frame(3), b in arb_frame(3)) {
        let da = DenseOperator::embed(&a);
        let db = DenseOperator::embed(&b);
        let ab = da.mul(&db);
        let ba = db.mul(&da);
        if a.commutes_with(&b) {
            prop_assert!(ab.sub(&ba).max_abs() < 1e-12);
        } else {
            prop_assert!(ab.add(&ba).max_abs() < 1e-12);
        }
    }

    #[test]
    fn schedule_average_matches_dense_mixture(
        seed in 0u64..500,
        mask in 0usize..8,
    ) {
        let n = 3;
        let h = PairHamiltonian::random(n, seed, 1.0).unwrap();
        let m: Vec<usize> = (0..n).filter(|&q| mask >> q & 1 == 1).collect();
        let schedule = decoupling_schedule(n, &m, 1.0).unwrap();
        let avg = symbolic_average(&schedule, &h).unwrap().to_dense();
        let dense = h.to_dense();
        let mut want = DenseOperator::zeros(1 << n);
        for seg in schedule.segments() {
            let v = DenseOperator::embed(&seg.frame);
            want = want.add(
                &v.mul(&dense)
                    .mul(&v.dagger())
                    .scale_re(seg.duration / schedule.total_time()),
            );
        }
        prop_assert!(avg.sub(&want).max_abs() < 1e-12);
    }

    #[test]
    fn expm_inverse_is_reverse_time(seed in 0u64..1000, t in 0.01f64..2.0) {
        let h = PairHamiltonian::random(2, seed, 1.0).unwrap();
        let a = h.to_dense();
        let u = expm_i(&a, t).unwrap();
        let back = expm_i(&a, -t).unwrap();
        prop_assert!(u.mul(&back).sub(&DenseOperator::identity(4)).max_abs() < 1e-10);
        prop_assert!(u.is_unitary(1e-10));
    }

    #[test]
    fn qpe_distribution_normalizes(seed in 0u64..200, m in 2usize..7) {
        let h = PairHamiltonian::random(2, seed, 1.0).unwrap();
        let cfg = PeConfig::from_spread(m, h.spread_bound(), QpeMode::Ideal, 0, 0).unwrap();
        let init = InitialState::Mixed(DensityMatrix::maximally_mixed(2));
        let dist = run_qpe(&h, &init, &cfg).unwrap();
        let total: f64 = dist.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dense_form_is_traceless(seed in 0u64..1000, n in 2usize..5) {
        let h = PairHamiltonian::random(n, seed, 1.0).unwrap();
        prop_assert!(h.to_dense().trace().norm() < 1e-12);
    }

    #[test]
    fn spread_bound_dominates_the_spectrum(seed in 0u64..1000, n in 2usize..5) {
        let h = PairHamiltonian::random(n, seed, 1.0).unwrap();
        let (values, _) = hermitian_eig(&h.to_dense()).unwrap();
        let spread = values.last().unwrap() - values.first().unwrap();
        prop_assert!(h.spread_bound() >= spread);
    }
}
