//! Phase estimation on the conditional evolution: ancilla preparation,
//! binary-weighted conditional stages, inverse Fourier transform, outcome
//! statistics, energy decoding and density-of-states estimation.
//!
//! The exact path never forms the 2^(n+m)-dimensional joint space. The
//! conditional stage is diagonal over ancilla basis states, so for an
//! eigenstate of energy E the ancilla register just picks up the geometric
//! phase ramp and the outcome distribution is the closed kernel
//! `|2^-m sum_l exp(il (2 E tau - 2 pi k / 2^m))|^2`; mixtures weight the
//! kernels by their eigenbasis populations. Pulse-level mode instead builds
//! the (n+1)-qubit conditional unitary per ancilla bit and applies its
//! ancilla blocks along every bitstring branch.

use num_complex::Complex64;

use crate::conditional::{conditional_evolution, ConversionParams};
use crate::error::{Error, Result};
use crate::hamiltonian::PairHamiltonian;
use crate::linalg::{hermitian_eig, DenseOperator, DensityMatrix, QuantumState};
use crate::rng::SplitMix64;

/// How the conditional evolution behind each ancilla bit is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QpeMode {
    /// Exact conditional phases from the diagonalization oracle.
    Ideal,
    /// The compiled conversion procedure at the given parameters.
    PulseLevel(ConversionParams),
}

/// Phase-estimation configuration.
#[derive(Debug, Clone, Copy)]
pub struct PeConfig {
    /// Ancilla register size m.
    pub ancilla_count: usize,
    /// Base evolution time tau.
    pub base_time: f64,
    /// Spectral-spread bound the base time was derived from.
    pub spread: f64,
    pub mode: QpeMode,
    pub shots: u64,
    pub seed: u64,
}

impl PeConfig {
    /// Standard configuration: tau chosen so that `2 tau spread = pi`.
    pub fn from_spread(
        ancilla_count: usize,
        spread: f64,
        mode: QpeMode,
        shots: u64,
        seed: u64,
    ) -> Result<Self> {
        if ancilla_count < 1 {
            return Err(Error::SystemSize {
                n: ancilla_count,
                reason: "need at least one ancilla qubit",
            });
        }
        Ok(PeConfig {
            ancilla_count,
            base_time: choose_tau(spread)?,
            spread,
            mode,
            shots,
            seed,
        })
    }

    pub fn bins(&self) -> usize {
        1usize << self.ancilla_count
    }

    /// Decode step size `pi / (2^m tau)`.
    pub fn resolution(&self) -> f64 {
        std::f64::consts::PI / (self.bins() as f64 * self.base_time)
    }
}

/// Base time such that the full spectral spread maps onto one phase period:
/// `tau = pi / (2 delta)`.
pub fn choose_tau(delta: f64) -> Result<f64> {
    if delta <= 0.0 {
        return Err(Error::NonPositiveSpread { delta });
    }
    Ok(std::f64::consts::PI / (2.0 * delta))
}

/// Outcome `k` with its decoded energy and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeOutcome {
    pub k: usize,
    pub probability: f64,
    pub energy: f64,
}

/// Exact outcome distribution over the 2^m ancilla readouts.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    m: usize,
    tau: f64,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn bins(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, k: usize) -> f64 {
        self.probabilities[k]
    }

    pub fn outcomes(&self) -> Vec<PeOutcome> {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, &p)| PeOutcome {
                k,
                probability: p,
                energy: decode_energy_raw(k, self.m, self.tau),
            })
            .collect()
    }

    pub fn modal_k(&self) -> usize {
        self.probabilities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(k, _)| k)
            .unwrap_or(0)
    }

    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// Target-register input of a run.
#[derive(Debug, Clone)]
pub enum InitialState {
    Pure(QuantumState),
    Mixed(DensityMatrix),
}

impl From<QuantumState> for InitialState {
    fn from(s: QuantumState) -> Self {
        InitialState::Pure(s)
    }
}

impl From<DensityMatrix> for InitialState {
    fn from(d: DensityMatrix) -> Self {
        InitialState::Mixed(d)
    }
}

/// Complex outcome amplitude of the ancilla register for a fixed target
/// energy, including the energy-dependent overall phase.
pub fn kernel_amplitude(energy: f64, k: usize, m: usize, tau: f64) -> Complex64 {
    let bins = 1usize << m;
    let theta = 2.0 * energy * tau - 2.0 * std::f64::consts::PI * k as f64 / bins as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for l in 0..bins {
        sum += Complex64::from_polar(1.0, theta * l as f64);
    }
    let global = Complex64::from_polar(1.0, -energy * tau * (bins as f64 - 1.0));
    global * sum / bins as f64
}

/// Outcome probability of the kernel at readout `k`.
pub fn kernel_probability(energy: f64, k: usize, m: usize, tau: f64) -> f64 {
    kernel_amplitude(energy, k, m, tau).norm_sqr()
}

fn eigen_weights(
    h: &PairHamiltonian,
    initial: &InitialState,
) -> Result<(Vec<f64>, Vec<f64>, DenseOperator)> {
    let dim = 1usize << h.n();
    let (values, vectors) = hermitian_eig(&h.to_dense())?;
    let weights = match initial {
        InitialState::Pure(psi) => {
            if psi.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: psi.dim(),
                });
            }
            (0..dim)
                .map(|i| {
                    let overlap: Complex64 = (0..dim)
                        .map(|row| vectors.at(row, i).conj() * psi.amplitudes()[row])
                        .sum();
                    overlap.norm_sqr()
                })
                .collect()
        }
        InitialState::Mixed(rho) => {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: rho.dim(),
                });
            }
            (0..dim)
                .map(|i| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for row in 0..dim {
                        for col in 0..dim {
                            acc += vectors.at(row, i).conj()
                                * rho.operator().at(row, col)
                                * vectors.at(col, i);
                        }
                    }
                    acc.re
                })
                .collect()
        }
    };
    Ok((values, weights, vectors))
}

/// Exact outcome distribution of a phase-estimation run.
pub fn run_qpe(
    h: &PairHamiltonian,
    initial: &InitialState,
    cfg: &PeConfig,
) -> Result<OutcomeDistribution> {
    if cfg.base_time <= 0.0 {
        return Err(Error::NonPositiveTime { t: cfg.base_time });
    }
    let m = cfg.ancilla_count;
    let bins = cfg.bins();
    let probabilities = match &cfg.mode {
        QpeMode::Ideal => {
            let (values, weights, _) = eigen_weights(h, initial)?;
            let mut probs = vec![0.0f64; bins];
            for (lambda, w) in values.iter().zip(&weights) {
                if *w == 0.0 {
                    continue;
                }
                for (k, p) in probs.iter_mut().enumerate() {
                    *p += w * kernel_probability(*lambda, k, m, cfg.base_time);
                }
            }
            probs
        }
        QpeMode::PulseLevel(params) => pulse_distribution(h, initial, cfg, params)?,
    };
    Ok(OutcomeDistribution {
        m,
        tau: cfg.base_time,
        probabilities,
    })
}

/// Distribution with the conditional stages replaced by the compiled
/// conversion procedure. Each per-bit conditional unitary is block-diagonal
/// over the ancilla, so branches are propagated per ancilla bitstring.
fn pulse_distribution(
    h: &PairHamiltonian,
    initial: &InitialState,
    cfg: &PeConfig,
    params: &ConversionParams,
) -> Result<Vec<f64>> {
    let n = h.n();
    let dim = 1usize << n;
    let m = cfg.ancilla_count;
    let bins = 1usize << m;

    // ancilla-0 and ancilla-1 blocks of the conditional unitary per bit
    let mut blocks0 = Vec::with_capacity(m);
    let mut blocks1 = Vec::with_capacity(m);
    for bit in 0..m {
        let t = cfg.base_time * (1u64 << bit) as f64;
        let u = conditional_evolution(h, t, params)?;
        let mut b0 = DenseOperator::zeros(dim);
        let mut b1 = DenseOperator::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                b0.set(i, j, u.at(i, j));
                b1.set(i, j, u.at(dim + i, dim + j));
            }
        }
        blocks0.push(b0);
        blocks1.push(b1);
    }

    let pure_distribution = |amplitudes: &[Complex64]| -> Vec<f64> {
        // branch states per ancilla bitstring l, built bit by bit: processing
        // bit j splits branch l into l (bit clear, ancilla-0 block) and
        // l + 2^j (bit set, ancilla-1 block)
        let mut branches: Vec<Vec<Complex64>> = vec![amplitudes.to_vec()];
        for bit in 0..m {
            let half = branches.len();
            let mut next = vec![Vec::new(); half * 2];
            for (l, state) in branches.iter().enumerate() {
                next[l] = blocks0[bit].apply(state);
                next[l + half] = blocks1[bit].apply(state);
            }
            branches = next;
        }
        let norm = 1.0 / bins as f64;
        (0..bins)
            .map(|k| {
                let mut acc = vec![Complex64::new(0.0, 0.0); dim];
                for (l, state) in branches.iter().enumerate() {
                    let phase = Complex64::from_polar(
                        1.0,
                        -2.0 * std::f64::consts::PI * (k * l % bins) as f64 / bins as f64,
                    );
                    for (a, s) in acc.iter_mut().zip(state) {
                        *a += phase * s;
                    }
                }
                acc.iter().map(|z| (z * norm).norm_sqr()).sum()
            })
            .collect()
    };

    match initial {
        InitialState::Pure(psi) => {
            if psi.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: psi.dim(),
                });
            }
            Ok(pure_distribution(psi.amplitudes()))
        }
        InitialState::Mixed(rho) => {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: rho.dim(),
                });
            }
            let (pops, basis) = hermitian_eig(rho.operator())?;
            let mut probs = vec![0.0f64; bins];
            for (i, &p) in pops.iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                let column: Vec<Complex64> = (0..dim).map(|row| basis.at(row, i)).collect();
                for (acc, q) in probs.iter_mut().zip(pure_distribution(&column)) {
                    *acc += p * q;
                }
            }
            Ok(probs)
        }
    }
}

fn decode_energy_raw(k: usize, m: usize, tau: f64) -> f64 {
    let bins = 1i64 << m;
    let k = k as i64;
    let wrapped = if k < bins / 2 { k } else { k - bins };
    std::f64::consts::PI / tau * wrapped as f64 / bins as f64
}

/// Decoded energy of readout `k` under the wraparound convention: readouts at
/// or past the midpoint represent negative energies.
pub fn decode_energy(k: usize, cfg: &PeConfig) -> Result<f64> {
    if k >= cfg.bins() {
        return Err(Error::OutcomeRange {
            k,
            m: cfg.ancilla_count,
        });
    }
    Ok(decode_energy_raw(k, cfg.ancilla_count, cfg.base_time))
}

/// One sampled readout histogram row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub k: usize,
    pub count: u64,
    pub probability: f64,
    pub energy: f64,
}

/// Measurement record over all 2^m readouts, zero rows included.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
    pub shots: u64,
    pub ancilla_count: usize,
    pub base_time: f64,
}

impl Histogram {
    fn from_distribution(dist: &OutcomeDistribution) -> Histogram {
        Histogram {
            bins: dist
                .outcomes()
                .into_iter()
                .map(|o| HistogramBin {
                    k: o.k,
                    count: 0,
                    probability: o.probability,
                    energy: o.energy,
                })
                .collect(),
            shots: 0,
            ancilla_count: dist.m,
            base_time: dist.tau,
        }
    }

    fn from_counts(dist: &OutcomeDistribution, counts: Vec<u64>, shots: u64) -> Histogram {
        Histogram {
            bins: counts
                .iter()
                .enumerate()
                .map(|(k, &count)| HistogramBin {
                    k,
                    count,
                    probability: count as f64 / shots as f64,
                    energy: decode_energy_raw(k, dist.m, dist.tau),
                })
                .collect(),
            shots,
            ancilla_count: dist.m,
            base_time: dist.tau,
        }
    }

    pub fn total_variation_to(&self, dist: &OutcomeDistribution) -> f64 {
        0.5 * self
            .bins
            .iter()
            .zip(dist.probabilities())
            .map(|(bin, &p)| (bin.probability - p).abs())
            .sum::<f64>()
    }
}

fn sample_counts(dist: &OutcomeDistribution, shots: u64, seed: u64, threads: usize) -> Vec<u64> {
    let bins = dist.bins();
    let total: f64 = dist.probabilities.iter().sum();
    let mut cdf = Vec::with_capacity(bins);
    let mut acc = 0.0;
    for &p in &dist.probabilities {
        acc += p / total;
        cdf.push(acc);
    }
    let draw = |shot: u64| -> usize {
        let u = SplitMix64::substream(seed, shot).next_f64();
        match cdf.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) => (i + 1).min(bins - 1),
            Err(i) => i.min(bins - 1),
        }
    };
    let threads = threads.max(1).min(shots.max(1) as usize);
    if threads <= 1 {
        let mut counts = vec![0u64; bins];
        for shot in 0..shots {
            counts[draw(shot)] += 1;
        }
        return counts;
    }
    // chunked fan-out; per-shot substreams make the merge order irrelevant
    let chunk = shots.div_ceil(threads as u64);
    let partials: Vec<Vec<u64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads as u64)
            .map(|t| {
                let draw = &draw;
                scope.spawn(move || {
                    let mut counts = vec![0u64; bins];
                    let lo = t * chunk;
                    let hi = ((t + 1) * chunk).min(shots);
                    for shot in lo..hi {
                        counts[draw(shot)] += 1;
                    }
                    counts
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut counts = vec![0u64; bins];
    for partial in partials {
        for (acc, c) in counts.iter_mut().zip(partial) {
            *acc += c;
        }
    }
    counts
}

/// Seeded i.i.d. samples from the exact outcome distribution.
pub fn sample_qpe(
    h: &PairHamiltonian,
    initial: &InitialState,
    cfg: &PeConfig,
) -> Result<Histogram> {
    sample_qpe_with_threads(h, initial, cfg, 1)
}

/// Same sampling fanned out over up to `threads` worker threads; bit-exact
/// with the serial path.
pub fn sample_qpe_with_threads(
    h: &PairHamiltonian,
    initial: &InitialState,
    cfg: &PeConfig,
    threads: usize,
) -> Result<Histogram> {
    if cfg.shots < 1 {
        return Err(Error::NoShots);
    }
    let dist = run_qpe(h, initial, cfg)?;
    let counts = sample_counts(&dist, cfg.shots, cfg.seed, threads);
    Ok(Histogram::from_counts(&dist, counts, cfg.shots))
}

/// Circular distance from readout `k` to the real-valued target position.
fn ring_distance(k: usize, target: f64, bins: usize) -> f64 {
    let diff = (k as f64 - target).rem_euclid(bins as f64);
    diff.min(bins as f64 - diff)
}

/// Empirical probability that the readout lands further than `e` ring steps
/// from the encoded energy position, together with the `1 / (2e - 2)` bound.
pub fn tail_probability_check(
    h: &PairHamiltonian,
    eigenstate: &QuantumState,
    cfg: &PeConfig,
    e: usize,
) -> Result<(f64, f64)> {
    if e < 2 {
        return Err(Error::TailThreshold { e });
    }
    let dense = h.to_dense();
    // Rayleigh quotient; exact for eigenstates
    let image = dense.apply(eigenstate.amplitudes());
    let energy: Complex64 = eigenstate
        .amplitudes()
        .iter()
        .zip(&image)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let energy = energy.re;

    let dist = run_qpe(h, &InitialState::Pure(eigenstate.clone()), cfg)?;
    let bins = dist.bins();
    let target =
        (bins as f64 * energy * cfg.base_time / std::f64::consts::PI).rem_euclid(bins as f64);
    let empirical: f64 = dist
        .probabilities()
        .iter()
        .enumerate()
        .filter(|(k, _)| ring_distance(*k, target, bins) > e as f64)
        .map(|(_, &p)| p)
        .sum();
    let bound = 1.0 / (2.0 * e as f64 - 2.0);
    Ok((empirical, bound))
}

/// Probability of readout `k` and the normalized target-register state
/// conditioned on it, for a pure input on the exact path. In the fine
/// resolution regime this state collapses onto single eigenspaces.
pub fn post_measurement_state(
    h: &PairHamiltonian,
    initial: &QuantumState,
    cfg: &PeConfig,
    k: usize,
) -> Result<(f64, QuantumState)> {
    if k >= cfg.bins() {
        return Err(Error::OutcomeRange {
            k,
            m: cfg.ancilla_count,
        });
    }
    let dim = 1usize << h.n();
    if initial.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: initial.dim(),
        });
    }
    let (values, vectors) = hermitian_eig(&h.to_dense())?;
    // eigenbasis coefficients of the input
    let coeffs: Vec<Complex64> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|row| vectors.at(row, i).conj() * initial.amplitudes()[row])
                .sum()
        })
        .collect();
    let mut unnormalized = vec![Complex64::new(0.0, 0.0); dim];
    for (i, (&lambda, c)) in values.iter().zip(&coeffs).enumerate() {
        let amp = kernel_amplitude(lambda, k, cfg.ancilla_count, cfg.base_time) * c;
        for (row, target) in unnormalized.iter_mut().enumerate() {
            *target += vectors.at(row, i) * amp;
        }
    }
    let prob: f64 = unnormalized.iter().map(|z| z.norm_sqr()).sum();
    if prob <= 1e-300 {
        return Err(Error::OutcomeRange {
            k,
            m: cfg.ancilla_count,
        });
    }
    let scale = 1.0 / prob.sqrt();
    let state = QuantumState::new(
        unnormalized
            .into_iter()
            .map(|z| z * scale)
            .collect::<Vec<_>>(),
    )?;
    Ok((prob, state))
}

/// Target-register preparation for density-of-states runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preparation {
    MaximallyMixed,
    /// Thermal equilibrium at inverse temperature beta, built from the
    /// diagonalization oracle (a simulation convenience, not part of the
    /// measured protocol).
    Thermal(f64),
}

impl Preparation {
    pub fn to_state(&self, h: &PairHamiltonian) -> Result<InitialState> {
        let n = h.n();
        match *self {
            Preparation::MaximallyMixed => {
                Ok(InitialState::Mixed(DensityMatrix::maximally_mixed(n)))
            }
            Preparation::Thermal(beta) => {
                if beta < 0.0 {
                    return Err(Error::InvalidDensity {
                        reason: format!("negative inverse temperature {beta}"),
                    });
                }
                let (values, vectors) = hermitian_eig(&h.to_dense())?;
                let ground = values[0];
                let boltzmann: Vec<f64> = values
                    .iter()
                    .map(|&v| (-beta * (v - ground)).exp())
                    .collect();
                let z: f64 = boltzmann.iter().sum();
                let dim = 1usize << n;
                let mut rho = DenseOperator::zeros(dim);
                for i in 0..dim {
                    for j in 0..dim {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (idx, w) in boltzmann.iter().enumerate() {
                            acc += vectors.at(i, idx) * (w / z) * vectors.at(j, idx).conj();
                        }
                        rho.set(i, j, acc);
                    }
                }
                Ok(InitialState::Mixed(DensityMatrix::new(rho)?))
            }
        }
    }
}

/// Readout distribution of a register prepared in `prep`: exact kernel
/// mixture when `exact`, otherwise seeded draws from it.
pub fn density_of_states(
    h: &PairHamiltonian,
    prep: Preparation,
    cfg: &PeConfig,
    exact: bool,
) -> Result<Histogram> {
    let initial = prep.to_state(h)?;
    let dist = run_qpe(h, &initial, cfg)?;
    if exact {
        Ok(Histogram::from_distribution(&dist))
    } else {
        if cfg.shots < 1 {
            return Err(Error::NoShots);
        }
        let counts = sample_counts(&dist, cfg.shots, cfg.seed, 1);
        Ok(Histogram::from_counts(&dist, counts, cfg.shots))
    }
}

/// Maximal runs of below-threshold bins strictly inside the occupied energy
/// range, in decoded-energy coordinates. The scan runs in energy order, so
/// runs never wrap around the readout ring.
pub fn gap_report(hist: &Histogram, threshold: f64) -> Vec<(f64, f64)> {
    let bins = hist.bins.len();
    // energy-ascending order: negative branch (upper half of k) first
    let order: Vec<usize> = (bins / 2..bins).chain(0..bins / 2).collect();
    let occupied: Vec<usize> = order
        .iter()
        .enumerate()
        .filter(|(_, &k)| hist.bins[k].probability >= threshold)
        .map(|(pos, _)| pos)
        .collect();
    let (Some(&first), Some(&last)) = (occupied.first(), occupied.last()) else {
        return Vec::new();
    };
    let mut gaps = Vec::new();
    let mut run_start: Option<usize> = None;
    for pos in first..=last {
        let k = order[pos];
        if hist.bins[k].probability < threshold {
            run_start.get_or_insert(pos);
        } else if let Some(start) = run_start.take() {
            gaps.push((
                hist.bins[order[start]].energy,
                hist.bins[order[pos - 1]].energy,
            ));
        }
    }
    gaps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliAxis;

    fn zz_pair() -> PairHamiltonian {
        let mut h = PairHamiltonian::zero(2).unwrap();
        h.set_coupling(0, 1, PauliAxis::Z, PauliAxis::Z, 1.0)
            .unwrap();
        h
    }

    #[test]
    fn tau_from_spread() {
        assert!((choose_tau(std::f64::consts::PI).unwrap() - 0.5).abs() < 1e-15);
        assert!((choose_tau(std::f64::consts::FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!(choose_tau(0.0).is_err());
    }

    #[test]
    fn zero_hamiltonian_reads_k0() {
        let h = PairHamiltonian::zero(2).unwrap();
        let cfg = PeConfig::from_spread(4, 1.0, QpeMode::Ideal, 0, 0).unwrap();
        let psi = QuantumState::basis(2, 0).unwrap();
        let dist = run_qpe(&h, &InitialState::Pure(psi), &cfg).unwrap();
        assert!((dist.probability(0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exact_grid_energy_is_deterministic() {
        // E = +1 eigenstate |00> of the zz coupling; choose tau so the phase
        // lands exactly on the readout grid
        let h = zz_pair();
        let m = 4;
        let bins = 1usize << m;
        let g = 3usize;
        // 2^m E tau / pi = g  =>  tau = g pi / 2^m for E = 1
        let tau = g as f64 * std::f64::consts::PI / bins as f64;
        let cfg = PeConfig {
            ancilla_count: m,
            base_time: tau,
            spread: 0.0,
            mode: QpeMode::Ideal,
            shots: 0,
            seed: 0,
        };
        let psi = QuantumState::basis(2, 0).unwrap();
        let dist = run_qpe(&h, &InitialState::Pure(psi), &cfg).unwrap();
        assert!((dist.probability(g) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn distribution_normalizes() {
        let h = PairHamiltonian::random(3, 5, 1.0).unwrap();
        let cfg = PeConfig::from_spread(6, h.spread_bound(), QpeMode::Ideal, 0, 0).unwrap();
        let dist = run_qpe(
            &h,
            &InitialState::Mixed(DensityMatrix::maximally_mixed(3)),
            &cfg,
        )
        .unwrap();
        let total: f64 = dist.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decode_conventions() {
        let cfg = PeConfig::from_spread(5, 4.0, QpeMode::Ideal, 0, 0).unwrap();
        assert_eq!(decode_energy(0, &cfg).unwrap(), 0.0);
        // midpoint decodes to the negative boundary
        let mid = cfg.bins() / 2;
        let e = decode_energy(mid, &cfg).unwrap();
        assert!((e + cfg.spread).abs() < 1e-12);
        assert!(decode_energy(cfg.bins(), &cfg).is_err());
    }

    #[test]
    fn sampling_is_seed_deterministic_and_thread_invariant() {
        let h = PairHamiltonian::random(2, 9, 1.0).unwrap();
        let cfg = PeConfig {
            shots: 512,
            seed: 1234,
            ..PeConfig::from_spread(4, h.spread_bound(), QpeMode::Ideal, 512, 1234).unwrap()
        };
        let init = InitialState::Mixed(DensityMatrix::maximally_mixed(2));
        let a = sample_qpe(&h, &init, &cfg).unwrap();
        let b = sample_qpe(&h, &init, &cfg).unwrap();
        let c = sample_qpe_with_threads(&h, &init, &cfg, 4).unwrap();
        for ((x, y), z) in a.bins.iter().zip(&b.bins).zip(&c.bins) {
            assert_eq!(x.count, y.count);
            assert_eq!(x.count, z.count);
        }
        let total: u64 = a.bins.iter().map(|b| b.count).sum();
        assert_eq!(total, 512);
    }

    #[test]
    fn single_shot_fills_one_bin() {
        let h = zz_pair();
        let cfg = PeConfig {
            shots: 1,
            ..PeConfig::from_spread(3, h.spread_bound(), QpeMode::Ideal, 1, 7).unwrap()
        };
        let hist = sample_qpe(
            &h,
            &InitialState::Pure(QuantumState::basis(2, 0).unwrap()),
            &cfg,
        )
        .unwrap();
        let nonzero: Vec<_> = hist.bins.iter().filter(|b| b.count > 0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].count, 1);
    }

    #[test]
    fn tail_bound_values() {
        let h = zz_pair();
        let cfg = PeConfig::from_spread(6, h.spread_bound(), QpeMode::Ideal, 0, 0).unwrap();
        let psi = QuantumState::basis(2, 0).unwrap();
        let (emp, bound) = tail_probability_check(&h, &psi, &cfg, 2).unwrap();
        assert!((bound - 0.5).abs() < 1e-15);
        assert!(emp <= bound);
        let (_, bound4) = tail_probability_check(&h, &psi, &cfg, 4).unwrap();
        assert!((bound4 - 1.0 / 6.0).abs() < 1e-15);
        assert!(tail_probability_check(&h, &psi, &cfg, 1).is_err());
    }

    #[test]
    fn two_level_dos_has_symmetric_peaks() {
        // single-qubit field: energies +1 and -1 with equal weight
        let mut h = PairHamiltonian::zero(1).unwrap();
        h.set_field(0, PauliAxis::Z, 1.0).unwrap();
        let cfg = PeConfig::from_spread(6, h.spread_bound(), QpeMode::Ideal, 0, 0).unwrap();
        let hist = density_of_states(&h, Preparation::MaximallyMixed, &cfg, true).unwrap();
        let plus: f64 = hist
            .bins
            .iter()
            .filter(|b| (b.energy - 1.0).abs() < cfg.resolution())
            .map(|b| b.probability)
            .sum();
        let minus: f64 = hist
            .bins
            .iter()
            .filter(|b| (b.energy + 1.0).abs() < cfg.resolution())
            .map(|b| b.probability)
            .sum();
        assert!((plus - minus).abs() < 1e-10);
        assert!(plus > 0.4);
        let gaps = gap_report(&hist, 1e-4);
        assert_eq!(gaps.len(), 1);
        assert!(gaps[0].0 < 0.0 && gaps[0].1 > 0.0 || gaps[0].0 > -1.0 && gaps[0].1 < 1.0);
    }

    #[test]
    fn cold_thermal_state_concentrates_on_ground_kernel() {
        let h = PairHamiltonian::random(2, 3, 1.0).unwrap();
        let cfg = PeConfig::from_spread(6, h.spread_bound(), QpeMode::Ideal, 0, 0).unwrap();
        let hist = density_of_states(&h, Preparation::Thermal(200.0), &cfg, true).unwrap();
        let (values, _) = hermitian_eig(&h.to_dense()).unwrap();
        let ground = values[0];
        let expected: Vec<f64> = (0..cfg.bins())
            .map(|k| kernel_probability(ground, k, cfg.ancilla_count, cfg.base_time))
            .collect();
        let tv: f64 = 0.5
            * hist
                .bins
                .iter()
                .zip(&expected)
                .map(|(b, &p)| (b.probability - p).abs())
                .sum::<f64>();
        assert!(tv < 1e-6);
    }

    #[test]
    fn uniform_histogram_reports_no_gaps() {
        let bins = 16;
        let hist = Histogram {
            bins: (0..bins)
                .map(|k| HistogramBin {
                    k,
                    count: 0,
                    probability: 1.0 / bins as f64,
                    energy: k as f64,
                })
                .collect(),
            shots: 0,
            ancilla_count: 4,
            base_time: 1.0,
        };
        assert!(gap_report(&hist, 1e-3).is_empty());
    }
}
