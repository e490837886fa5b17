//! Converts isolated pair terms into ancilla-conditioned evolutions via
//! group-commutator steps, and composes them over all pairs and axis choices
//! into `exp(-i H (x) sigma_z t)`.
//!
//! The step sequence has a handful of free conventions (gate-sandwich
//! direction, engineered-coupling sign and weight, commutator factor order)
//! that are not pinned by the construction itself. They are fixed once per
//! process by a numerical self-test: the chosen variant is the one for which
//! the dense identity
//!
//! `i u_j [Hr, Ej] u_j† + i u_k [Hr, Ek] u_k† = 2 Hs (x) sigma_z`
//!
//! holds exactly (Hr the rescaled term, Hs the share term, E the engineered
//! coupling as actually switched on) and for which the composed step lands on
//! `exp(-i 2 Hs (x) sigma_z eps^2)` to third order in eps.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{pair_share_1q_weight, rescaled_1q_weight, PairHamiltonian};
use crate::linalg::{
    embed_one_qubit, expm_i, hermitian_eig, pauli_exp, spectral_norm, DenseOperator,
};
use crate::pauli::{PauliAxis, PauliString};
use crate::pulse::{
    inversion_schedule, isolate_pair_schedule, rescale_schedule, simulate_schedule, PulseSchedule,
};

/// Single-qubit Clifford with `u sigma_axis u† = sigma_axis.succ()` for all
/// three axes: the 120-degree rotation about the (1,1,1) Bloch axis.
#[derive(Debug, Clone, Copy)]
pub struct AxisCycleGate {
    qubit: usize,
}

fn cycle_gate_matrix() -> &'static DenseOperator {
    static GATE: OnceLock<DenseOperator> = OnceLock::new();
    GATE.get_or_init(|| {
        let third = 1.0 / 3f64.sqrt();
        let mut gen = DenseOperator::zeros(2);
        for axis in PauliAxis::ALL {
            let p = DenseOperator::embed(&PauliString::single(1, 0, axis).unwrap());
            gen = gen.add(&p.scale_re(third));
        }
        let candidate = expm_i(&gen, std::f64::consts::FRAC_PI_3).unwrap();
        let satisfies = |u: &DenseOperator| {
            PauliAxis::ALL.iter().all(|&axis| {
                let p = DenseOperator::embed(&PauliString::single(1, 0, axis).unwrap());
                let q = DenseOperator::embed(&PauliString::single(1, 0, axis.succ()).unwrap());
                u.mul(&p).mul(&u.dagger()).sub(&q).max_abs() < 1e-12
            })
        };
        if satisfies(&candidate) {
            candidate
        } else {
            let adjoint = candidate.dagger();
            assert!(
                satisfies(&adjoint),
                "neither rotation direction cycles the axes"
            );
            adjoint
        }
    })
}

impl AxisCycleGate {
    pub fn new(qubit: usize) -> Self {
        AxisCycleGate { qubit }
    }

    pub fn qubit(&self) -> usize {
        self.qubit
    }

    /// The verified 2x2 matrix.
    pub fn matrix(&self) -> &'static DenseOperator {
        cycle_gate_matrix()
    }

    /// The gate embedded into an `n_total`-qubit register.
    pub fn embedded(&self, n_total: usize) -> DenseOperator {
        embed_one_qubit(self.matrix(), self.qubit, n_total)
    }
}

/// How the rescaled-term evolutions inside a conversion step are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionMode {
    /// Exact exponentials of the rescaled term.
    Ideal,
    /// Pulse-compiled isolation/rescaling/inversion schedules against the
    /// full Hamiltonian.
    PulseLevel,
}

/// Knobs of the conversion procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConversionParams {
    /// Small step time of the group commutator.
    pub epsilon: f64,
    /// Inversion cycle count p.
    pub inversion_slices: usize,
    /// Cycle repetitions when simulating compiled schedules.
    pub schedule_slices: usize,
    pub mode: EvolutionMode,
    /// Skip sweep terms whose coupling and both matching single-qubit
    /// coefficients are exactly zero (their step is the identity anyway).
    pub skip_zero_terms: bool,
}

impl ConversionParams {
    pub fn new(
        epsilon: f64,
        inversion_slices: usize,
        schedule_slices: usize,
        mode: EvolutionMode,
    ) -> Result<Self> {
        let params = ConversionParams {
            epsilon,
            inversion_slices,
            schedule_slices,
            mode,
            skip_zero_terms: false,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn ideal(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 1, 1, EvolutionMode::Ideal)
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon <= 0.0 {
            return Err(Error::NonPositiveStep {
                epsilon: self.epsilon,
            });
        }
        if self.inversion_slices < 1 {
            return Err(Error::SliceCount {
                p: self.inversion_slices,
            });
        }
        if self.schedule_slices < 1 {
            return Err(Error::ScheduleSlices);
        }
        Ok(())
    }
}

/// The conventions fixed by the self-test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepConventions {
    /// Sign of the engineered coupling switched on in the first engineered
    /// interval.
    pub engineered_sign: i8,
    /// Whether each engineered interval runs for eps/2 instead of eps.
    pub engineered_halved: bool,
    /// Whether the cycle gate applied first is the adjoint (so the effective
    /// generator is conjugated by the forward gate).
    pub adjoint_gate_first: bool,
    /// Whether the rescaled-term evolution precedes the engineered interval.
    pub system_first: bool,
}

impl StepConventions {
    pub fn describe(&self) -> String {
        format!(
            "eng_sign={}{}, eng_time={}, first_gate={}, order={}, sweep_conditional_time=2*eps^2",
            if self.engineered_sign >= 0 { "+" } else { "-" },
            1,
            if self.engineered_halved {
                "eps/2"
            } else {
                "eps"
            },
            if self.adjoint_gate_first {
                "u_dagger"
            } else {
                "u"
            },
            if self.system_first {
                "system-then-engineered"
            } else {
                "engineered-then-system"
            },
        )
    }
}

/// `sys (x) 1` on system-plus-ancilla, ancilla as the top index bit.
pub fn with_idle_ancilla(sys: &DenseOperator) -> DenseOperator {
    DenseOperator::identity(2).kron(sys)
}

/// `sys (x) sigma_z` on system-plus-ancilla.
pub fn with_ancilla_z(sys: &DenseOperator) -> DenseOperator {
    let z = DenseOperator::embed(&PauliString::single(1, 0, PauliAxis::Z).unwrap());
    z.kron(sys)
}

fn engineered_string(n: usize, qubit: usize, axis: PauliAxis) -> PauliString {
    PauliString::from_pairs(n + 1, &[(qubit, axis.succ()), (n, PauliAxis::Z)]).unwrap()
}

/// Algebraic form of the step generator for one qubit side under a convention
/// choice: `i C [Hr_full, w * eng] C†`.
fn side_generator(
    hr_full: &DenseOperator,
    eng: &DenseOperator,
    gate: &DenseOperator,
    weight: f64,
    adjoint_gate_first: bool,
) -> DenseOperator {
    let comm = hr_full.mul(eng).sub(&eng.mul(hr_full));
    // procedure G1 ... G1† means the effective generator is G1† K G1
    let c = if adjoint_gate_first {
        gate.clone()
    } else {
        gate.dagger()
    };
    c.mul(&comm)
        .mul(&c.dagger())
        .scale(Complex64::new(0.0, weight))
}

/// Max-abs residual of the dense identity
/// `i C [Hr, w Ej] C† + i C [Hr, w Ek] C† = 2 Hs (x) sigma_z` for one term
/// choice, where `w` is the engineered weight and `C` the gate the effective
/// generator is conjugated by.
pub fn commutator_identity_residual(
    h: &PairHamiltonian,
    j: usize,
    k: usize,
    alpha: PauliAxis,
    beta: PauliAxis,
    weight: f64,
    adjoint_gate_first: bool,
) -> Result<f64> {
    let n = h.n();
    let hr = h.isolated_term(j, k, alpha, beta, rescaled_1q_weight(n))?;
    let hs = h.isolated_term(j, k, alpha, beta, pair_share_1q_weight(n))?;
    let hr_full = with_idle_ancilla(&hr.to_dense(n)?);
    let target = with_ancilla_z(&hs.to_dense(n)?).scale_re(2.0);
    let eng_j = DenseOperator::embed(&engineered_string(n, j, alpha));
    let eng_k = DenseOperator::embed(&engineered_string(n, k, beta));
    let uj = AxisCycleGate::new(j).embedded(n + 1);
    let uk = AxisCycleGate::new(k).embedded(n + 1);
    let total = side_generator(&hr_full, &eng_j, &uj, weight, adjoint_gate_first).add(
        &side_generator(&hr_full, &eng_k, &uk, weight, adjoint_gate_first),
    );
    Ok(total.sub(&target).max_abs())
}

fn resolve_conventions() -> StepConventions {
    let h = PairHamiltonian::random(2, 0x5eed_cafe, 1.0).unwrap();
    let n = h.n();
    let choices = [
        (0, 1, PauliAxis::X, PauliAxis::Z),
        (0, 1, PauliAxis::Y, PauliAxis::Y),
    ];

    let mut algebra_pick: Option<(i8, bool, bool)> = None;
    'search: for &sign in &[-1i8, 1] {
        for &halved in &[true, false] {
            for &adjoint_first in &[true, false] {
                let weight = f64::from(sign) * if halved { 0.5 } else { 1.0 };
                let mut worst = 0.0f64;
                for &(j, k, alpha, beta) in &choices {
                    let residual =
                        commutator_identity_residual(&h, j, k, alpha, beta, weight, adjoint_first)
                            .unwrap();
                    worst = worst.max(residual);
                }
                if worst < 1e-9 {
                    algebra_pick = Some((sign, halved, adjoint_first));
                    break 'search;
                }
            }
        }
    }
    let (engineered_sign, engineered_halved, adjoint_gate_first) =
        algebra_pick.expect("no convention variant satisfies the commutator identity");

    // order of the four middle factors: decided by which one realizes the
    // target evolution to third order
    let epsilon = 0.02;
    let mut best: Option<(f64, bool)> = None;
    for &system_first in &[true, false] {
        let conv = StepConventions {
            engineered_sign,
            engineered_halved,
            adjoint_gate_first,
            system_first,
        };
        let params = ConversionParams::ideal(epsilon).unwrap();
        let mut worst = 0.0f64;
        for &(j, k, alpha, beta) in &choices {
            let step = build_step(&h, j, k, alpha, beta, &params, &conv).unwrap();
            let hs = h
                .isolated_term(j, k, alpha, beta, pair_share_1q_weight(n))
                .unwrap();
            let target = expm_i(
                &with_ancilla_z(&hs.to_dense(n).unwrap()),
                2.0 * epsilon * epsilon,
            )
            .unwrap();
            worst = worst.max(spectral_norm(&step.sub(&target)));
        }
        match best {
            Some((prev, _)) if prev <= worst => {}
            _ => best = Some((worst, system_first)),
        }
    }
    let (_, system_first) = best.unwrap();

    StepConventions {
        engineered_sign,
        engineered_halved,
        adjoint_gate_first,
        system_first,
    }
}

/// Conventions fixed once per process; deterministic.
pub fn resolved_conventions() -> &'static StepConventions {
    static CONV: OnceLock<StepConventions> = OnceLock::new();
    CONV.get_or_init(resolve_conventions)
}

/// Forward and inverted realizations of the rescaled-term evolution for time
/// eps, on system-plus-ancilla.
fn rescaled_evolutions(
    h: &PairHamiltonian,
    j: usize,
    k: usize,
    alpha: PauliAxis,
    beta: PauliAxis,
    params: &ConversionParams,
) -> Result<(DenseOperator, DenseOperator)> {
    let n = h.n();
    match params.mode {
        EvolutionMode::Ideal => {
            let hr = h.isolated_term(j, k, alpha, beta, rescaled_1q_weight(n))?;
            let fwd = expm_i(&hr.to_dense(n)?, params.epsilon)?;
            let bwd = fwd.dagger();
            Ok((with_idle_ancilla(&fwd), with_idle_ancilla(&bwd)))
        }
        EvolutionMode::PulseLevel => {
            let iso = isolate_pair_schedule(n, j, k, alpha, beta, 1.0)?;
            let forward = PulseSchedule::compose(
                &rescale_schedule(n, j, k, alpha, beta, params.epsilon)?,
                &iso,
            )?;
            let fwd = simulate_schedule(&forward, h, params.schedule_slices)?;
            let inverted = PulseSchedule::compose(
                &inversion_schedule(
                    n,
                    j,
                    k,
                    alpha,
                    beta,
                    params.epsilon,
                    params.inversion_slices,
                )?,
                &forward,
            )?;
            let bwd = simulate_schedule(&inverted, h, params.schedule_slices)?;
            Ok((with_idle_ancilla(&fwd), with_idle_ancilla(&bwd)))
        }
    }
}

fn conversion_side(
    n: usize,
    qubit: usize,
    axis: PauliAxis,
    fwd: &DenseOperator,
    bwd: &DenseOperator,
    conv: &StepConventions,
    epsilon: f64,
) -> DenseOperator {
    let nt = n + 1;
    let u = AxisCycleGate::new(qubit).embedded(nt);
    let ud = u.dagger();
    let eng = engineered_string(n, qubit, axis);
    let d = if conv.engineered_halved {
        epsilon / 2.0
    } else {
        epsilon
    };
    let theta = f64::from(conv.engineered_sign) * d;
    let eng_fwd = pauli_exp(&eng, theta);
    let eng_bwd = pauli_exp(&eng, -theta);
    let (first, last) = if conv.adjoint_gate_first {
        (&ud, &u)
    } else {
        (&u, &ud)
    };
    let sequence: [&DenseOperator; 4] = if conv.system_first {
        [fwd, &eng_fwd, bwd, &eng_bwd]
    } else {
        [&eng_fwd, fwd, &eng_bwd, bwd]
    };
    let mut acc = first.clone();
    for factor in sequence {
        acc = factor.mul(&acc);
    }
    last.mul(&acc)
}

fn build_step(
    h: &PairHamiltonian,
    j: usize,
    k: usize,
    alpha: PauliAxis,
    beta: PauliAxis,
    params: &ConversionParams,
    conv: &StepConventions,
) -> Result<DenseOperator> {
    let n = h.n();
    let (fwd, bwd) = rescaled_evolutions(h, j, k, alpha, beta, params)?;
    let side_j = conversion_side(n, j, alpha, &fwd, &bwd, conv, params.epsilon);
    let side_k = conversion_side(n, k, beta, &fwd, &bwd, conv, params.epsilon);
    // j side acts first in time
    Ok(side_k.mul(&side_j))
}

/// One conversion step for the `(j, k, alpha, beta)` term: approximates
/// `exp(-i 2 Hs (x) sigma_z eps^2)` with an O(eps^3) defect, where `Hs` is the
/// share term of the chosen coefficients.
pub fn pair_conditional_step(
    h: &PairHamiltonian,
    j: usize,
    k: usize,
    alpha: PauliAxis,
    beta: PauliAxis,
    params: &ConversionParams,
) -> Result<DenseOperator> {
    params.validate()?;
    // index validation
    h.isolated_term(j, k, alpha, beta, 1.0)?;
    build_step(h, j, k, alpha, beta, params, resolved_conventions())
}

/// Conditional time advanced by one full sweep over all terms.
pub fn sweep_time(epsilon: f64) -> f64 {
    2.0 * epsilon * epsilon
}

fn sweep_unitary(h: &PairHamiltonian, params: &ConversionParams) -> Result<DenseOperator> {
    let n = h.n();
    let conv = resolved_conventions();
    let mut acc = DenseOperator::identity(1 << (n + 1));
    for j in 0..n {
        for k in (j + 1)..n {
            for alpha in PauliAxis::ALL {
                for beta in PauliAxis::ALL {
                    if params.skip_zero_terms {
                        let term = h.isolated_term(j, k, alpha, beta, 1.0)?;
                        if term.a == 0.0 && term.b == 0.0 && term.c == 0.0 {
                            continue;
                        }
                    }
                    let step = build_step(h, j, k, alpha, beta, params, conv)?;
                    acc = step.mul(&acc);
                }
            }
        }
    }
    Ok(acc)
}

/// Simulated conditional evolution `exp(-i H (x) sigma_z t)`: lexicographic
/// sweeps over all (pair, axes) terms, each sweep advancing `2 eps^2` of
/// conditional time, the final sweep trimmed to land exactly on `t`.
pub fn conditional_evolution(
    h: &PairHamiltonian,
    t: f64,
    params: &ConversionParams,
) -> Result<DenseOperator> {
    params.validate()?;
    if t <= 0.0 {
        return Err(Error::NonPositiveTime { t });
    }
    let per_sweep = sweep_time(params.epsilon);
    let sweeps = (t / per_sweep).ceil().max(1.0) as usize;
    let remainder = t - (sweeps as f64 - 1.0) * per_sweep;
    let trimmed_epsilon = (remainder / 2.0).sqrt();

    let mut result = if sweeps > 1 {
        sweep_unitary(h, params)?.pow(sweeps - 1)
    } else {
        DenseOperator::identity(1 << (h.n() + 1))
    };
    let last = if (trimmed_epsilon - params.epsilon).abs() < 1e-15 && sweeps > 1 {
        // full-size final sweep; reuse nothing extra
        sweep_unitary(h, params)?
    } else {
        let mut trimmed = *params;
        trimmed.epsilon = trimmed_epsilon;
        sweep_unitary(h, &trimmed)?
    };
    result = last.mul(&result);
    Ok(result)
}

/// Exact `exp(-i H (x) sigma_z t)` from the diagonalization oracle:
/// block-diagonal in the ancilla with blocks `exp(-i H t)` and `exp(+i H t)`.
pub fn ideal_conditional(h: &PairHamiltonian, t: f64) -> DenseOperator {
    let n = h.n();
    let dim = 1usize << n;
    let (values, vectors) = hermitian_eig(&h.to_dense()).expect("pair Hamiltonians are Hermitian");
    let block = |sign: f64| -> DenseOperator {
        let phases: Vec<Complex64> = values
            .iter()
            .map(|&lambda| Complex64::from_polar(1.0, -sign * lambda * t))
            .collect();
        let mut out = DenseOperator::zeros(dim);
        for i in 0..dim {
            for jj in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (idx, phase) in phases.iter().enumerate() {
                    acc += vectors.at(i, idx) * phase * vectors.at(jj, idx).conj();
                }
                out.set(i, jj, acc);
            }
        }
        out
    };
    let minus = block(1.0); // ancilla |0>: sigma_z eigenvalue +1
    let plus = block(-1.0); // ancilla |1>: sigma_z eigenvalue -1
    let mut out = DenseOperator::zeros(2 * dim);
    for i in 0..dim {
        for jj in 0..dim {
            out.set(i, jj, minus.at(i, jj));
            out.set(dim + i, dim + jj, plus.at(i, jj));
        }
    }
    out
}
