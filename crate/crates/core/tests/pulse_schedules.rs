//! Schedule-level oracles: the symbolic average against the dense convex
//! combination, sign enumeration for the constructed cycles, and pulse-level
//! convergence toward the ideal average evolution.

use specfind_core::pulse::PulseSchedule;
use specfind_core::verify::inversion_distances;
use specfind_core::*;

/// Independent route for the average: duration-weighted sum of the dense
/// frame conjugations.
fn dense_average(schedule: &PulseSchedule, h: &PairHamiltonian) -> DenseOperator {
    let dim = 1usize << h.n();
    let dense = h.to_dense();
    let mut acc = DenseOperator::zeros(dim);
    for seg in schedule.segments() {
        match seg.generator {
            Generator::System => {
                let v = DenseOperator::embed(&seg.frame);
                let conj = v.mul(&dense).mul(&v.dagger());
                acc = acc.add(&conj.scale_re(seg.duration / schedule.total_time()));
            }
            Generator::Idle => {}
            Generator::EngineeredCoupling { .. } => panic!("system-only schedules here"),
        }
    }
    acc
}

#[test]
fn symbolic_average_matches_dense_combination() {
    let h = PairHamiltonian::random(3, 41, 1.0).unwrap();
    let schedules = vec![
        decoupling_schedule(3, &[0], 1.0).unwrap(),
        decoupling_schedule(3, &[0, 2], 0.7).unwrap(),
        isolate_pair_schedule(3, 0, 2, PauliAxis::Y, PauliAxis::X, 0.4).unwrap(),
        inversion_schedule(3, 0, 1, PauliAxis::X, PauliAxis::Z, 0.3, 3).unwrap(),
        cancel_one_qubit_schedule(3, 1, 2, PauliAxis::Z, PauliAxis::Y, 1.0).unwrap(),
        rescale_schedule(3, 0, 1, PauliAxis::X, PauliAxis::Z, 0.2).unwrap(),
    ];
    for schedule in schedules {
        let avg = symbolic_average(&schedule, &h).unwrap();
        let want = dense_average(&schedule, &h);
        assert!(
            avg.to_dense().sub(&want).max_abs() < 1e-12,
            "schedule with {} segments",
            schedule.segments().len()
        );
    }
}

#[test]
fn decoupling_kills_exactly_the_touched_terms() {
    let h = PairHamiltonian::random(4, 6, 1.0).unwrap();
    for mask in 0..(1usize << 4) {
        let m: Vec<usize> = (0..4).filter(|&q| mask >> q & 1 == 1).collect();
        let schedule = decoupling_schedule(4, &m, 1.0).unwrap();
        let avg = symbolic_average(&schedule, &h).unwrap();
        for (pattern, coeff) in avg.terms() {
            let touches = pattern.support().any(|(q, _)| mask >> q & 1 == 1);
            if touches {
                assert_eq!(coeff, 0.0, "mask {mask:04b} pattern {pattern}");
            } else {
                let original = h
                    .terms()
                    .into_iter()
                    .find(|(p, _)| *p == pattern)
                    .map(|(_, c)| c)
                    .unwrap();
                assert_eq!(coeff, original, "mask {mask:04b} pattern {pattern}");
            }
        }
    }
}

#[test]
fn isolation_survivors_by_sign_enumeration() {
    // independent enumeration: a term's averaged weight is the signed dwell
    // fraction, sign per segment from the anticommuting-overlap parity
    let h = PairHamiltonian::random(3, 17, 1.0).unwrap();
    let schedule = isolate_pair_schedule(3, 0, 1, PauliAxis::X, PauliAxis::Z, 1.0).unwrap();
    let avg = symbolic_average(&schedule, &h).unwrap();
    for (pattern, coeff) in h.terms() {
        let mut signed = 0.0;
        for seg in schedule.segments() {
            let mut sign = 1.0;
            for (q, a) in pattern.support() {
                if let Some(g) = seg.frame.axis_on(q) {
                    if g != a {
                        sign = -sign;
                    }
                }
            }
            signed += sign * seg.duration;
        }
        let expect = coeff * signed / schedule.total_time();
        let got = avg
            .terms()
            .into_iter()
            .find(|(p, _)| *p == pattern)
            .map(|(_, c)| c)
            .unwrap();
        assert!((got - expect).abs() < 1e-15, "pattern {pattern}");
    }
    let survivors: Vec<String> = avg
        .terms()
        .into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|(p, _)| p.to_string())
        .collect();
    assert_eq!(survivors, vec!["X0", "Z1", "X0.Z1"]);
}

#[test]
fn isolation_with_zero_coupling_keeps_field_terms() {
    let mut h = PairHamiltonian::zero(3).unwrap();
    h.set_field(0, PauliAxis::X, 0.8).unwrap();
    h.set_field(1, PauliAxis::Z, -0.4).unwrap();
    // the (x, z) coupling itself stays zero
    let schedule = isolate_pair_schedule(3, 0, 1, PauliAxis::X, PauliAxis::Z, 1.0).unwrap();
    let avg = symbolic_average(&schedule, &h).unwrap();
    assert_eq!(avg.field(0, PauliAxis::X), 0.8);
    assert_eq!(avg.field(1, PauliAxis::Z), -0.4);
    assert_eq!(avg.coupling(0, 1, PauliAxis::X, PauliAxis::Z), 0.0);
}

#[test]
fn cancellation_leaves_pure_coupling_densely() {
    let h = PairHamiltonian::random(2, 29, 1.0).unwrap();
    let iso = isolate_pair_schedule(2, 0, 1, PauliAxis::Y, PauliAxis::X, 1.0).unwrap();
    let cancel = cancel_one_qubit_schedule(2, 0, 1, PauliAxis::Y, PauliAxis::X, 1.0).unwrap();
    let schedule = PulseSchedule::compose(&cancel, &iso).unwrap();
    let avg = symbolic_average(&schedule, &h).unwrap();
    let c = h.coupling(0, 1, PauliAxis::Y, PauliAxis::X);
    let coupling_only = DenseOperator::embed(
        &PauliString::from_pairs(2, &[(0, PauliAxis::Y), (1, PauliAxis::X)]).unwrap(),
    )
    .scale_re(c);
    assert!(avg.to_dense().sub(&coupling_only).max_abs() < 1e-12);
}

#[test]
fn rescale_dense_average_hits_corrected_target() {
    let h = PairHamiltonian::random(3, 33, 1.0).unwrap();
    let n = 3;
    let iso = isolate_pair_schedule(n, 0, 1, PauliAxis::X, PauliAxis::Z, 1.0).unwrap();
    let rescale = rescale_schedule(n, 0, 1, PauliAxis::X, PauliAxis::Z, 1.0).unwrap();
    let schedule = PulseSchedule::compose(&rescale, &iso).unwrap();
    let avg = symbolic_average(&schedule, &h).unwrap();
    let target = h
        .isolated_term(0, 1, PauliAxis::X, PauliAxis::Z, rescaled_1q_weight(n))
        .unwrap()
        .to_dense(n)
        .unwrap();
    assert!(avg.to_dense().sub(&target).max_abs() < 1e-12);
    // at n = 3 the corrected flip fraction is 1/3 of the interval
    assert!((rescale.segments()[0].duration - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn inversion_of_the_bare_term_is_exact() {
    // the three patterns of an isolated term commute, so the cycle reproduces
    // the average evolution with no Trotter defect at any p
    let h = PairHamiltonian::random(3, 2, 1.0).unwrap();
    let term = h
        .isolated_term(0, 1, PauliAxis::X, PauliAxis::Z, rescaled_1q_weight(3))
        .unwrap()
        .to_pair_hamiltonian(3)
        .unwrap();
    let t = 0.2;
    let forward = expm_i(&term.to_dense(), t).unwrap();
    for p in [1usize, 4] {
        let schedule = inversion_schedule(3, 0, 1, PauliAxis::X, PauliAxis::Z, t, p).unwrap();
        let inverted = simulate_schedule(&schedule, &term, 1).unwrap();
        let dist = spectral_norm(&inverted.mul(&forward).sub(&DenseOperator::identity(8)));
        assert!(dist < 1e-12, "p {p}: {dist}");
    }
}

#[test]
fn pulse_level_inversion_error_halves_per_doubling() {
    let h = PairHamiltonian::random(3, 7, 1.0).unwrap();
    let distances = inversion_distances(&h, 0.2, &[4, 8, 16, 32]).unwrap();
    for pair in distances.windows(2) {
        assert!(pair[1] <= pair[0] / 2.0, "{distances:?}");
    }
}

#[test]
fn simulated_decoupling_converges_like_one_over_slices() {
    let h = PairHamiltonian::random(3, 5, 1.0).unwrap();
    let total = 0.5;
    let schedule = decoupling_schedule(3, &[2], total).unwrap();
    let avg = symbolic_average(&schedule, &h).unwrap();
    let ideal = expm_i(&avg.to_dense(), total).unwrap();
    let mut dists = Vec::new();
    for slices in [8usize, 16, 32, 64] {
        let u = simulate_schedule(&schedule, &h, slices).unwrap();
        dists.push(spectral_norm(&u.sub(&ideal)));
    }
    for pair in dists.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!(ratio < 1.0, "{dists:?}");
        assert!((0.3..0.7).contains(&ratio), "{dists:?}");
    }
}

#[test]
fn engineered_segment_simulation_is_the_coupling_exponential() {
    // one ancilla-coupled segment must equal the closed-form exponential
    let h = PairHamiltonian::zero(2).unwrap();
    let schedule = PulseSchedule::new(
        2,
        true,
        vec![Segment {
            frame: PauliString::identity(2),
            duration: 0.37,
            generator: Generator::EngineeredCoupling {
                qubit: 1,
                axis: PauliAxis::Y,
                sign: -1,
            },
        }],
    )
    .unwrap();
    let u = simulate_schedule(&schedule, &h, 3).unwrap();
    let coupling = PauliString::from_pairs(3, &[(1, PauliAxis::Y), (2, PauliAxis::Z)]).unwrap();
    let want = expm_i(&DenseOperator::embed(&coupling).scale_re(-1.0), 0.37).unwrap();
    assert!(u.sub(&want).max_abs() < 1e-12);
}

#[test]
fn larger_registers_compile_and_average() {
    // six-qubit decoupling rides the 64-column array
    let h = PairHamiltonian::random(8, 44, 1.0).unwrap();
    let m: Vec<usize> = (2..8).collect();
    let schedule = decoupling_schedule(8, &m, 1.0).unwrap();
    assert_eq!(schedule.segments().len(), 64);
    let avg = symbolic_average(&schedule, &h).unwrap();
    for (pattern, coeff) in avg.terms() {
        let touches = pattern.support().any(|(q, _)| q >= 2);
        if touches {
            assert_eq!(coeff, 0.0);
        }
    }
    assert_eq!(
        avg.coupling(0, 1, PauliAxis::X, PauliAxis::Y),
        h.coupling(0, 1, PauliAxis::X, PauliAxis::Y)
    );
}
