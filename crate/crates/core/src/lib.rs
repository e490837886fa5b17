//! Dense simulation and analysis toolkit for spin-pair Hamiltonian
//! spectroscopy.
//!
//! The pipeline: an unknown pair-interaction Hamiltonian is steered by
//! averaged Pauli-frame pulse schedules (decoupling, pair isolation,
//! rescaling, sign inversion), converted term by term into an
//! ancilla-conditioned evolution via group-commutator steps, and read out by
//! phase estimation to recover its spectrum or density of states. Every
//! approximation layer is instrumented and checked against the exact
//! diagonalization oracle in [`linalg`].
//!
//! # Quick start
//!
//! ```
//! use specfind_core::*;
//!
//! // a two-qubit instance: fields on both qubits plus one coupling
//! let mut h = PairHamiltonian::zero(2)?;
//! h.set_field(0, PauliAxis::Z, 1.0)?;
//! h.set_field(1, PauliAxis::Z, 1.0)?;
//! h.set_coupling(0, 1, PauliAxis::X, PauliAxis::X, 1.0)?;
//!
//! // exact spectrum from the diagonalization oracle
//! let (energies, _) = hermitian_eig(&h.to_dense())?;
//! assert!((energies[0] + 5f64.sqrt()).abs() < 1e-9);
//!
//! // phase-estimation readout of the ground state
//! let cfg = PeConfig::from_spread(6, h.spread_bound(), QpeMode::Ideal, 0, 0)?;
//! let (_, ground) = h.eigenstate(0)?;
//! let dist = run_qpe(&h, &InitialState::Pure(ground), &cfg)?;
//! let decoded = decode_energy(dist.modal_k(), &cfg)?;
//! assert!((decoded - energies[0]).abs() <= cfg.resolution());
//! # Ok::<(), specfind_core::Error>(())
//! ```

pub mod conditional;
pub mod document;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod oa;
pub mod pauli;
pub mod pulse;
pub mod qpe;
pub mod rng;
pub mod verify;

pub use conditional::{
    conditional_evolution, ideal_conditional, pair_conditional_step, resolved_conventions,
    AxisCycleGate, ConversionParams, EvolutionMode, StepConventions,
};
pub use document::HamiltonianDocument;
pub use error::{Error, Result};
pub use hamiltonian::{pair_share_1q_weight, rescaled_1q_weight, IsolatedTerm, PairHamiltonian};
pub use linalg::{
    expm_i, hermitian_eig, spectral_norm, DenseOperator, DensityMatrix, QuantumState,
};
pub use oa::{build_orthogonal_array, OrthogonalArray};
pub use pauli::{PauliAxis, PauliString};
pub use pulse::{
    cancel_one_qubit_schedule, decoupling_schedule, inversion_schedule, isolate_pair_schedule,
    rescale_schedule, rescale_schedule_toward, simulate_schedule, symbolic_average, Generator,
    PulseSchedule, Segment,
};
pub use qpe::{
    choose_tau, decode_energy, density_of_states, gap_report, post_measurement_state, run_qpe,
    sample_qpe, sample_qpe_with_threads, tail_probability_check, Histogram, HistogramBin,
    InitialState, OutcomeDistribution, PeConfig, PeOutcome, Preparation, QpeMode,
};
pub use verify::{run_verification, VerifyOptions, VerifyReport};
