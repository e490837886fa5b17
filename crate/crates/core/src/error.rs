//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by construction and simulation routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitIndex { index: usize, n: usize },
    #[error("system size {n} not supported ({reason})")]
    SystemSize { n: usize, reason: &'static str },
    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver failed to converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigConvergence { sweeps: usize, off: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("state vector norm {norm} is not 1 within tolerance")]
    StateNorm { norm: f64 },
    #[error("density matrix invalid: {reason}")]
    InvalidDensity { reason: String },
    #[error("convex weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },
    #[error("negative weight {weight} in convex combination")]
    NegativeWeight { weight: f64 },
    #[error("qubit pair requires two distinct qubits, got {qubit} twice")]
    DegeneratePair { qubit: usize },
    #[error("duplicate assignment for qubit {qubit}")]
    DuplicateQubit { qubit: usize },
    #[error("orthogonal array supports at most {max} rows, requested {requested}")]
    ArraySize { requested: usize, max: usize },
    #[error("inversion slice count must be at least 1, got {p}")]
    SliceCount { p: usize },
    #[error("schedule slices must be at least 1")]
    ScheduleSlices,
    #[error("symbolic average undefined: schedule contains an engineered-coupling segment")]
    EngineeredSegment,
    #[error("schedule composition requires plain system segments in the outer schedule")]
    CompositeGenerator,
    #[error("spectral spread must be positive, got {delta}")]
    NonPositiveSpread { delta: f64 },
    #[error("evolution time must be positive, got {t}")]
    NonPositiveTime { t: f64 },
    #[error("conversion step size must be positive, got {epsilon}")]
    NonPositiveStep { epsilon: f64 },
    #[error("outcome {k} out of range for {m} ancilla qubits")]
    OutcomeRange { k: usize, m: usize },
    #[error("tail distance must be an integer >= 2, got {e}")]
    TailThreshold { e: usize },
    #[error("shot count must be at least 1")]
    NoShots,
    #[error("invalid document: {0}")]
    Document(String),
    #[error("invalid schedule dump: {0}")]
    ScheduleParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
