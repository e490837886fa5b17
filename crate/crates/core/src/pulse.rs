//! Pulse-schedule compilation and simulation for averaged Hamiltonian
//! engineering: orthogonal-array decoupling of a qubit set, four-frame pair
//! isolation, single-qubit-term cancellation, the rescaling split and the
//! sign-inversion cycle.
//!
//! Every schedule carries two faces. The symbolic face averages the
//! frame-conjugated coefficient Hamiltonians exactly (integer sign
//! arithmetic). The pulse face multiplies out the segment unitaries, with
//! frames applied as instantaneous perfect conjugations, so that the only
//! deviation from the ideal average evolution is inter-segment
//! non-commutativity.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hamiltonian::{rescaled_1q_weight, PairHamiltonian};
use crate::linalg::{expm_i, DenseOperator};
use crate::oa::build_orthogonal_array;
use crate::pauli::{PauliAxis, PauliString};

/// What evolves during a segment.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// The (unknown) system Hamiltonian.
    System,
    /// A switchable coupling `sign * sigma_axis^qubit (x) sigma_z(ancilla)`.
    EngineeredCoupling {
        qubit: usize,
        axis: PauliAxis,
        sign: i8,
    },
    /// Nothing evolves; time still passes.
    Idle,
}

/// One conjugation-frame interval: the evolution of `generator` for
/// `duration`, wrapped as `frame * evolution * frame†`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub frame: PauliString,
    pub duration: f64,
    pub generator: Generator,
}

/// Ordered list of segments over an `n`-qubit system, optionally extended by
/// one ancilla qubit (index `n`).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    n: usize,
    has_ancilla: bool,
    segments: Vec<Segment>,
    total_time: f64,
}

impl PulseSchedule {
    pub fn new(n: usize, has_ancilla: bool, segments: Vec<Segment>) -> Result<Self> {
        let mut total = 0.0;
        for seg in &segments {
            if seg.duration < 0.0 {
                return Err(Error::NonPositiveTime { t: seg.duration });
            }
            if seg.frame.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: seg.frame.n(),
                });
            }
            if let Generator::EngineeredCoupling { qubit, .. } = seg.generator {
                if !has_ancilla {
                    return Err(Error::EngineeredSegment);
                }
                if qubit >= n {
                    return Err(Error::QubitIndex { index: qubit, n });
                }
            }
            total += seg.duration;
        }
        if total <= 0.0 {
            return Err(Error::NonPositiveTime { t: total });
        }
        Ok(PulseSchedule {
            n,
            has_ancilla,
            segments,
            total_time: total,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_ancilla(&self) -> bool {
        self.has_ancilla
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// Runs the whole cycle of `inner` inside each segment of `outer`,
    /// composing frames and scaling the inner durations into the outer
    /// segment. First-order averages nest: the result averages to
    /// `avg_outer(avg_inner(H))`.
    pub fn compose(outer: &PulseSchedule, inner: &PulseSchedule) -> Result<PulseSchedule> {
        if outer.n != inner.n || outer.has_ancilla != inner.has_ancilla {
            return Err(Error::DimensionMismatch {
                expected: outer.n,
                actual: inner.n,
            });
        }
        let mut segments = Vec::with_capacity(outer.segments.len() * inner.segments.len());
        for outer_seg in &outer.segments {
            if outer_seg.generator != Generator::System {
                return Err(Error::CompositeGenerator);
            }
            let scale = outer_seg.duration / inner.total_time;
            for inner_seg in &inner.segments {
                segments.push(Segment {
                    frame: outer_seg.frame.compose(&inner_seg.frame),
                    duration: scale * inner_seg.duration,
                    generator: inner_seg.generator.clone(),
                });
            }
        }
        PulseSchedule::new(outer.n, outer.has_ancilla, segments)
    }

    /// The schedule dump: one `<duration> <frame> <generator>` line per
    /// segment.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for seg in &self.segments {
            let gen = match &seg.generator {
                Generator::System => "SYS".to_string(),
                Generator::Idle => "IDLE".to_string(),
                Generator::EngineeredCoupling { qubit, axis, sign } => {
                    format!(
                        "ENG{}j{}:{}",
                        if *sign >= 0 { '+' } else { '-' },
                        qubit,
                        axis
                    )
                }
            };
            out.push_str(&format!("{} {} {}\n", seg.duration, seg.frame, gen));
        }
        out
    }

    /// Parses the dump format back into a schedule on a known register.
    pub fn parse(text: &str, n: usize, has_ancilla: bool) -> Result<PulseSchedule> {
        let mut segments = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::ScheduleParse(format!(
                    "line {}: expected 3 fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let duration: f64 = fields[0].parse().map_err(|_| {
                Error::ScheduleParse(format!("line {}: bad duration `{}`", lineno + 1, fields[0]))
            })?;
            let frame = PauliString::parse(fields[1], n)?;
            let generator = parse_generator(fields[2], lineno + 1)?;
            segments.push(Segment {
                frame,
                duration,
                generator,
            });
        }
        PulseSchedule::new(n, has_ancilla, segments)
    }
}

fn parse_generator(text: &str, lineno: usize) -> Result<Generator> {
    match text {
        "SYS" => Ok(Generator::System),
        "IDLE" => Ok(Generator::Idle),
        _ => {
            let rest = text.strip_prefix("ENG").ok_or_else(|| {
                Error::ScheduleParse(format!("line {lineno}: unknown generator `{text}`"))
            })?;
            let (sign, rest) = match rest.as_bytes().first() {
                Some(b'+') => (1i8, &rest[1..]),
                Some(b'-') => (-1i8, &rest[1..]),
                _ => {
                    return Err(Error::ScheduleParse(format!(
                        "line {lineno}: engineered generator needs a sign"
                    )))
                }
            };
            let rest = rest.strip_prefix('j').ok_or_else(|| {
                Error::ScheduleParse(format!("line {lineno}: expected `j<qubit>:<axis>`"))
            })?;
            let (qubit_str, axis_str) = rest.split_once(':').ok_or_else(|| {
                Error::ScheduleParse(format!("line {lineno}: expected `j<qubit>:<axis>`"))
            })?;
            let qubit: usize = qubit_str.parse().map_err(|_| {
                Error::ScheduleParse(format!("line {lineno}: bad qubit `{qubit_str}`"))
            })?;
            let axis = axis_str
                .chars()
                .next()
                .and_then(PauliAxis::parse)
                .ok_or_else(|| {
                    Error::ScheduleParse(format!("line {lineno}: bad axis `{axis_str}`"))
                })?;
            Ok(Generator::EngineeredCoupling { qubit, axis, sign })
        }
    }
}

/// Schedule whose average switches off every term touching the qubit set `m`
/// while leaving the terms disjoint from `m` unchanged: segment `r` conjugates
/// qubit `j` in `m` by the `r`-th symbol of its orthogonal-array row.
pub fn decoupling_schedule(n: usize, m: &[usize], total: f64) -> Result<PulseSchedule> {
    if total <= 0.0 {
        return Err(Error::NonPositiveTime { t: total });
    }
    let mut targets: Vec<usize> = m.to_vec();
    targets.sort_unstable();
    targets.dedup();
    if let Some(&bad) = targets.iter().find(|&&q| q >= n) {
        return Err(Error::QubitIndex { index: bad, n });
    }
    if targets.is_empty() {
        return PulseSchedule::new(
            n,
            false,
            vec![Segment {
                frame: PauliString::identity(n),
                duration: total,
                generator: Generator::System,
            }],
        );
    }
    let oa = build_orthogonal_array(targets.len())?;
    let d = oa.length();
    let mut segments = Vec::with_capacity(d);
    for col in 0..d {
        let mut pairs = Vec::new();
        for (row, &qubit) in targets.iter().enumerate() {
            if let Some(axis) = oa.symbol(row, col) {
                pairs.push((qubit, axis));
            }
        }
        segments.push(Segment {
            frame: PauliString::from_pairs(n, &pairs)?,
            duration: total / d as f64,
            generator: Generator::System,
        });
    }
    PulseSchedule::new(n, false, segments)
}

/// The four-frame cancellation that keeps only the `(alpha, beta)` component
/// of the `(j, k)` coupling and the matching single-qubit terms, combined with
/// decoupling of every other qubit. The symbolic average is
/// `r_alpha^j sigma_alpha^j + r_beta^k sigma_beta^k + J sigma sigma`.
pub fn isolate_pair_schedule(
    n: usize,
    j: usize,
    k: usize,
    alpha: PauliAxis,
    beta: PauliAxis,
    total: f64,
) -> Result<PulseSchedule> {
    if j == k {
        return Err(Error::DegeneratePair { qubit: j });
    }
    if j >= n || k >= n {
        return Err(Error::QubitIndex { index: j.max(k), n });
    }
    let frames = [
        PauliString::identity(n),
        PauliString::single(n, j, alpha)?,
        PauliString::single(n, k, beta)?,
        PauliString::from_pairs(n, &[(j, alpha), (k, beta)])?,
    ];
    let outer = PulseSchedule::new(
        n,
        false,
        frames
            .into_iter()
            .map(|frame| Segment {
                frame,
                duration: total / 4.0,
                generator: Generator::System,
            })
            .collect(),
    )?;
    let rest: Vec<usize> = (0..n).filter(|&q| q != j && q != k).collect();
    if rest.is_empty() {
        return Ok(outer);
    }
    let inner = decoupling_schedule(n, &rest, 1.0)?;
    PulseSchedule::compose(&outer, &inner)
}

/// Removes the single-qubit parts of an isolated term by spending half the
/// time conjugated by the successor-axis product frame; the bilinear part
/// commutes with that frame and survives.
pub fn cancel_one_qubit_schedule(
    n: usize,
    j: usize,
    k: usize,
    alpha: PauliAxis,
    beta: PauliAxis,
    total: f64,
) -> Result<PulseSchedule> {
    if j == k {
        return Err(Error::DegeneratePair { qubit: j });
    }
    let flip = PauliString::from_pairs(n, &[(j, alpha.succ()), (k, beta.succ())])?;
    PulseSchedule::new(
        n,
        false,
        vec![
            Segment {
                frame: PauliString::identity(n),
                duration: total / 2.0,
                generator: Generator::System,
            },
            Segment {
                frame: flip,
                duration: total / 2.0,
                generator: Generator::System,
            },
        ],
    )
}

/// Two-segment split that scales the single-qubit parts of an isolated term
/// down to `target_1q_scale` while leaving the bilinear part alone: a fraction
/// `f = (1 - target) / 2` of the interval runs conjugated by the
/// successor-axis product frame, which anticommutes with each single-qubit
/// factor and commutes with the bilinear one.
pub fn rescale_schedule_toward(
    n: usize,
    j: usize,
    k: usize,
    alpha: PauliAxis,
    beta: PauliAxis,
    delta: f64,
    target_1q_scale: f64,
) -> Result<PulseSchedule> {
    if j == k {
        return Err(Error::DegeneratePair { qubit: j });
    }
    if !(0.0..=1.0).contains(&target_1q_scale) {
        return Err(Error::SystemSize {
            n,
            reason: "rescale target outside the convex range [0, 1]",
        });
    }
    let f = (1.0 - target_1q_scale) / 2.0;
    let flip = PauliString::from_pairs(n, &[(j, alpha.succ()), (k, beta.succ())])?;
    PulseSchedule::new(
        n,
        false,
        vec![
            Segment {
                frame: flip,
                duration: f * delta,
                generator: Generator::System,
            },
            Segment {
                frame: PauliString::identity(n),
                duration: (1.0 - f) * delta,
                generator: Generator::System,
            },
        ],
    )
}

/// Rescaling toward the corrected conversion weight `2 / (3 (n - 1))`. The
/// corrected target stays inside the convex range for every `n >= 2`, so no
/// special two-qubit treatment is needed.
pub fn rescale_schedule(
    n: usize,
    j: usize,
    k: usize,
    alpha: PauliAxis,
    beta: PauliAxis,
    delta: f64,
) -> Result<PulseSchedule> {
    if n < 2 {
        return Err(Error::SystemSize {
            n,
            reason: "rescaling needs at least one pair",
        });
    }
    rescale_schedule_toward(n, j, k, alpha, beta, delta, rescaled_1q_weight(n))
}

/// Sign-inversion cycle: `3 p` equal intervals, conjugated in turn by the
/// successor-axis frames on `j`, on `k`, and on both. Each frame triple
/// averages an isolated `(a, b, c)` term to `-(a, b, c) / 3`, so running the
/// generator for wall-clock `3 t` nets the inverse of the plain evolution for
/// `t` in the large-`p` limit.
pub fn inversion_schedule(
    n: usize,
    j: usize,
    k: usize,
    alpha: PauliAxis,
    beta: PauliAxis,
    t: f64,
    p: usize,
) -> Result<PulseSchedule> {
    if p < 1 {
        return Err(Error::SliceCount { p });
    }
    if j == k {
        return Err(Error::DegeneratePair { qubit: j });
    }
    let frames = [
        PauliString::single(n, j, alpha.succ())?,
        PauliString::single(n, k, beta.succ())?,
        PauliString::from_pairs(n, &[(j, alpha.succ()), (k, beta.succ())])?,
    ];
    let segments = (0..3 * p)
        .map(|l| Segment {
            frame: frames[l % 3].clone(),
            duration: t / p as f64,
            generator: Generator::System,
        })
        .collect();
    PulseSchedule::new(n, false, segments)
}

/// First-order average Hamiltonian of a schedule: the duration-weighted convex
/// combination of the frame-conjugated coefficient Hamiltonians. Sign
/// cancellations are exact because each coefficient accumulates its positive
/// and negative dwell times separately.
pub fn symbolic_average(schedule: &PulseSchedule, h: &PairHamiltonian) -> Result<PairHamiltonian> {
    if h.n() != schedule.n {
        return Err(Error::DimensionMismatch {
            expected: schedule.n,
            actual: h.n(),
        });
    }
    if schedule
        .segments
        .iter()
        .any(|s| matches!(s.generator, Generator::EngineeredCoupling { .. }))
    {
        return Err(Error::EngineeredSegment);
    }
    let n = schedule.n;
    let total = schedule.total_time;
    let mut out = PairHamiltonian::zero(n)?;
    let dwell = |pattern: &PauliString| -> f64 {
        let mut plus = 0.0;
        let mut minus = 0.0;
        for seg in &schedule.segments {
            if seg.generator == Generator::Idle {
                continue;
            }
            if seg.frame.commutes_with(pattern) {
                plus += seg.duration;
            } else {
                minus += seg.duration;
            }
        }
        (plus - minus) / total
    };
    for qubit in 0..n {
        for axis in PauliAxis::ALL {
            let coeff = h.field(qubit, axis);
            if coeff == 0.0 {
                continue;
            }
            let pattern = PauliString::single(n, qubit, axis)?;
            out.set_field(qubit, axis, coeff * dwell(&pattern))?;
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            for alpha in PauliAxis::ALL {
                for beta in PauliAxis::ALL {
                    let coeff = h.coupling(j, k, alpha, beta);
                    if coeff == 0.0 {
                        continue;
                    }
                    let pattern = PauliString::from_pairs(n, &[(j, alpha), (k, beta)])?;
                    out.set_coupling(j, k, alpha, beta, coeff * dwell(&pattern))?;
                }
            }
        }
    }
    Ok(out)
}

/// Pulse-level unitary of a schedule against a concrete system Hamiltonian.
///
/// `slices` repeats the whole cycle that many times with every duration
/// divided accordingly. Frame conjugation wraps each slice, so each segment's
/// own evolution is exact and Trotter error comes only from non-commuting
/// neighbours; the distance to the ideal average evolution falls off like
/// `1 / slices`.
pub fn simulate_schedule(
    schedule: &PulseSchedule,
    h: &PairHamiltonian,
    slices: usize,
) -> Result<DenseOperator> {
    if slices < 1 {
        return Err(Error::ScheduleSlices);
    }
    if h.n() != schedule.n {
        return Err(Error::DimensionMismatch {
            expected: schedule.n,
            actual: h.n(),
        });
    }
    let n_total = schedule.n + usize::from(schedule.has_ancilla);
    let dim = 1usize << n_total;

    let system_dense = if schedule.has_ancilla {
        DenseOperator::identity(2).kron(&h.to_dense())
    } else {
        h.to_dense()
    };

    let mut exp_cache: HashMap<(u8, usize, usize, i8, u64), DenseOperator> = HashMap::new();
    let mut cycle = DenseOperator::identity(dim);
    for seg in &schedule.segments {
        let tau = seg.duration / slices as f64;
        if tau == 0.0 {
            continue;
        }
        let step = match &seg.generator {
            Generator::Idle => DenseOperator::identity(dim),
            Generator::System => {
                let key = (0u8, 0, 0, 0, tau.to_bits());
                match exp_cache.get(&key) {
                    Some(e) => e.clone(),
                    None => {
                        let e = expm_i(&system_dense, tau)?;
                        exp_cache.insert(key, e.clone());
                        e
                    }
                }
            }
            Generator::EngineeredCoupling { qubit, axis, sign } => {
                let key = (1u8, *qubit, axis.index(), *sign, tau.to_bits());
                match exp_cache.get(&key) {
                    Some(e) => e.clone(),
                    None => {
                        let coupling = PauliString::from_pairs(
                            n_total,
                            &[(*qubit, *axis), (schedule.n, PauliAxis::Z)],
                        )?;
                        let generator = DenseOperator::embed(&coupling).scale_re(f64::from(*sign));
                        let e = expm_i(&generator, tau)?;
                        exp_cache.insert(key, e.clone());
                        e
                    }
                }
            }
        };
        let unit = if seg.frame.is_identity() {
            step
        } else {
            let frame = DenseOperator::embed(&seg.frame.extended(n_total)?);
            frame.mul(&step).mul(&frame.dagger())
        };
        cycle = unit.mul(&cycle);
    }
    Ok(cycle.pow(slices))
}
