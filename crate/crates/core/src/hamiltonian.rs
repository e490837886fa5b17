//! Coefficient-level model of spin Hamiltonians built from single-qubit terms
//! and pairwise couplings, with a symbolic calculus for Pauli-frame
//! conjugation and convex averaging.
//!
//! Frame conjugation only ever flips coefficient signs, so schedule averages
//! can be evaluated exactly at this layer and cross-checked against the dense
//! representation.

use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::pauli::{PauliAxis, PauliString};
use crate::rng::SplitMix64;

/// Largest register handled at the coefficient layer.
pub const MAX_QUBITS: usize = 8;

/// Real coefficients of a pair-interaction Hamiltonian: one 3-vector of
/// single-qubit weights per qubit and one 3x3 block of coupling weights per
/// unordered qubit pair. Energy units with hbar = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PairHamiltonian {
    n: usize,
    single: Vec<[f64; 3]>,
    pair: Vec<[[f64; 3]; 3]>,
}

fn pair_rank(n: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < n);
    j * n - j * (j + 1) / 2 + (k - j - 1)
}

impl PairHamiltonian {
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::SystemSize {
                n,
                reason: "coefficient layer supports 1..=8 qubits",
            });
        }
        Ok(PairHamiltonian {
            n,
            single: vec![[0.0; 3]; n],
            pair: vec![[[0.0; 3]; 3]; n * (n - 1) / 2],
        })
    }

    /// Deterministic instance with coefficients uniform in
    /// `[-coeff_range, coeff_range]`.
    pub fn random(n: usize, seed: u64, coeff_range: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::SystemSize {
                n,
                reason: "random instances need at least one pair",
            });
        }
        let mut h = Self::zero(n)?;
        let mut rng = SplitMix64::new(seed);
        for j in 0..n {
            for axis in PauliAxis::ALL {
                h.single[j][axis.index()] = rng.next_symmetric(coeff_range);
            }
        }
        for j in 0..n {
            for k in (j + 1)..n {
                for alpha in PauliAxis::ALL {
                    for beta in PauliAxis::ALL {
                        h.pair[pair_rank(n, j, k)][alpha.index()][beta.index()] =
                            rng.next_symmetric(coeff_range);
                    }
                }
            }
        }
        Ok(h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self, qubit: usize, axis: PauliAxis) -> f64 {
        self.single[qubit][axis.index()]
    }

    pub fn set_field(&mut self, qubit: usize, axis: PauliAxis, value: f64) -> Result<()> {
        if qubit >= self.n {
            return Err(Error::QubitIndex {
                index: qubit,
                n: self.n,
            });
        }
        self.single[qubit][axis.index()] = value;
        Ok(())
    }

    /// Coupling weight on `sigma_alpha^j sigma_beta^k`; the unordered pair may
    /// be given in either order.
    pub fn coupling(&self, j: usize, k: usize, alpha: PauliAxis, beta: PauliAxis) -> f64 {
        if j < k {
            self.pair[pair_rank(self.n, j, k)][alpha.index()][beta.index()]
        } else {
            self.pair[pair_rank(self.n, k, j)][beta.index()][alpha.index()]
        }
    }

    pub fn set_coupling(
        &mut self,
        j: usize,
        k: usize,
        alpha: PauliAxis,
        beta: PauliAxis,
        value: f64,
    ) -> Result<()> {
        if j == k {
            return Err(Error::DegeneratePair { qubit: j });
        }
        let n = self.n;
        if j >= n || k >= n {
            return Err(Error::QubitIndex { index: j.max(k), n });
        }
        if j < k {
            self.pair[pair_rank(n, j, k)][alpha.index()][beta.index()] = value;
        } else {
            self.pair[pair_rank(n, k, j)][beta.index()][alpha.index()] = value;
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.single.iter().flatten().all(|&c| c == 0.0)
            && self.pair.iter().flatten().flatten().all(|&c| c == 0.0)
    }

    /// Iterates every stored coefficient as (pauli-string pattern, value).
    pub fn terms(&self) -> Vec<(PauliString, f64)> {
        let mut out = Vec::new();
        for j in 0..self.n {
            for axis in PauliAxis::ALL {
                let c = self.single[j][axis.index()];
                out.push((PauliString::single(self.n, j, axis).unwrap(), c));
            }
        }
        for j in 0..self.n {
            for k in (j + 1)..self.n {
                for alpha in PauliAxis::ALL {
                    for beta in PauliAxis::ALL {
                        let c = self.pair[pair_rank(self.n, j, k)][alpha.index()][beta.index()];
                        out.push((
                            PauliString::from_pairs(self.n, &[(j, alpha), (k, beta)]).unwrap(),
                            c,
                        ));
                    }
                }
            }
        }
        out
    }

    /// Dense 2^n operator: sum of coefficient-weighted Pauli embeddings.
    pub fn to_dense(&self) -> DenseOperator {
        let dim = 1usize << self.n;
        let mut out = DenseOperator::zeros(dim);
        for (pattern, coeff) in self.terms() {
            if coeff == 0.0 {
                continue;
            }
            out = out.add(&DenseOperator::embed(&pattern).scale_re(coeff));
        }
        out
    }

    /// Conjugation by a Pauli frame at the coefficient level: each term's sign
    /// flips exactly when its pattern anticommutes with the frame.
    pub fn conjugate(&self, frame: &PauliString) -> Result<PairHamiltonian> {
        if frame.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: frame.n(),
            });
        }
        let mut out = self.clone();
        for j in 0..self.n {
            for axis in PauliAxis::ALL {
                let sign = site_sign(frame, j, axis);
                out.single[j][axis.index()] = sign * self.single[j][axis.index()];
            }
        }
        for j in 0..self.n {
            for k in (j + 1)..self.n {
                let rank = pair_rank(self.n, j, k);
                for alpha in PauliAxis::ALL {
                    for beta in PauliAxis::ALL {
                        let sign = site_sign(frame, j, alpha) * site_sign(frame, k, beta);
                        out.pair[rank][alpha.index()][beta.index()] =
                            sign * self.pair[rank][alpha.index()][beta.index()];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Convex combination; weights must be nonnegative and sum to 1 within
    /// 1e-12.
    pub fn average(terms: &[(f64, PairHamiltonian)]) -> Result<PairHamiltonian> {
        let sum: f64 = terms.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() >= 1e-12 {
            return Err(Error::WeightSum { sum });
        }
        if let Some((w, _)) = terms.iter().find(|(w, _)| *w < 0.0) {
            return Err(Error::NegativeWeight { weight: *w });
        }
        let n = terms[0].1.n;
        let mut out = PairHamiltonian::zero(n)?;
        for (w, h) in terms {
            if h.n != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: h.n,
                });
            }
            for j in 0..n {
                for a in 0..3 {
                    out.single[j][a] += w * h.single[j][a];
                }
            }
            for (acc, src) in out.pair.iter_mut().zip(&h.pair) {
                for a in 0..3 {
                    for b in 0..3 {
                        acc[a][b] += w * src[a][b];
                    }
                }
            }
        }
        Ok(out)
    }

    /// The three coefficients living on one (pair, axis-pair) choice, with the
    /// single-qubit weights scaled by `scale_1q`.
    pub fn isolated_term(
        &self,
        j: usize,
        k: usize,
        alpha: PauliAxis,
        beta: PauliAxis,
        scale_1q: f64,
    ) -> Result<IsolatedTerm> {
        if j == k {
            return Err(Error::DegeneratePair { qubit: j });
        }
        if j >= self.n || k >= self.n {
            return Err(Error::QubitIndex {
                index: j.max(k),
                n: self.n,
            });
        }
        Ok(IsolatedTerm {
            j,
            k,
            alpha,
            beta,
            a: scale_1q * self.field(j, alpha),
            b: scale_1q * self.field(k, beta),
            c: self.coupling(j, k, alpha, beta),
        })
    }

    /// Triangle-inequality bound on the eigenvalue spread
    /// `lambda_max - lambda_min`.
    pub fn spread_bound(&self) -> f64 {
        let singles: f64 = self.single.iter().flatten().map(|c| c.abs()).sum();
        let pairs: f64 = self.pair.iter().flatten().flatten().map(|c| c.abs()).sum();
        2.0 * (singles + pairs)
    }

    /// Oracle eigenpair: the `index`-th eigenvalue (ascending) and its
    /// eigenstate.
    pub fn eigenstate(&self, index: usize) -> Result<(f64, crate::linalg::QuantumState)> {
        let dim = 1usize << self.n;
        if index >= dim {
            return Err(Error::QubitIndex { index, n: self.n });
        }
        let (values, vectors) = crate::linalg::hermitian_eig(&self.to_dense())?;
        let column: Vec<_> = (0..dim).map(|row| vectors.at(row, index)).collect();
        Ok((values[index], crate::linalg::QuantumState::new(column)?))
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        let s = self
            .single
            .iter()
            .flatten()
            .map(|c| c.abs())
            .fold(0.0, f64::max);
        let p = self
            .pair
            .iter()
            .flatten()
            .flatten()
            .map(|c| c.abs())
            .fold(0.0, f64::max);
        s.max(p)
    }
}

fn site_sign(frame: &PauliString, qubit: usize, axis: PauliAxis) -> f64 {
    match frame.axis_on(qubit) {
        None => 1.0,
        Some(gamma) if gamma == axis => 1.0,
        Some(_) => -1.0,
    }
}

/// Single-qubit weight that makes the per-pair share terms sum back to the
/// full Hamiltonian: each single-qubit coefficient is spread over the
/// 3 (n - 1) (pair, partner-axis) choices that contain it.
pub fn pair_share_1q_weight(n: usize) -> f64 {
    1.0 / (3.0 * (n as f64 - 1.0))
}

/// Single-qubit weight of the rescaled term fed into the conditional
/// conversion step; twice the share weight, so the commutator step lands
/// exactly on the share term.
pub fn rescaled_1q_weight(n: usize) -> f64 {
    2.0 * pair_share_1q_weight(n)
}

/// The residual Hamiltonian on one qubit pair after isolation:
/// `a sigma_alpha^j + b sigma_beta^k + c sigma_alpha^j sigma_beta^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolatedTerm {
    pub j: usize,
    pub k: usize,
    pub alpha: PauliAxis,
    pub beta: PauliAxis,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl IsolatedTerm {
    /// The term viewed as a sparse pair Hamiltonian on `n` qubits.
    pub fn to_pair_hamiltonian(&self, n: usize) -> Result<PairHamiltonian> {
        let mut h = PairHamiltonian::zero(n)?;
        h.set_field(self.j, self.alpha, self.a)?;
        h.set_field(self.k, self.beta, self.b)?;
        h.set_coupling(self.j, self.k, self.alpha, self.beta, self.c)?;
        Ok(h)
    }

    /// Dense embedding on an `n`-qubit register.
    pub fn to_dense(&self, n: usize) -> Result<DenseOperator> {
        Ok(self.to_pair_hamiltonian(n)?.to_dense())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_hamiltonian_dense_is_zero() {
        let h = PairHamiltonian::zero(2).unwrap();
        assert!(h.to_dense().max_abs() == 0.0);
    }

    #[test]
    fn single_zz_coupling_is_diagonal() {
        let mut h = PairHamiltonian::zero(2).unwrap();
        h.set_coupling(0, 1, PauliAxis::Z, PauliAxis::Z, 1.0)
            .unwrap();
        let d = h.to_dense();
        for (i, e) in [1.0, -1.0, -1.0, 1.0].into_iter().enumerate() {
            assert!((d.at(i, i).re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn dense_is_traceless() {
        let h = PairHamiltonian::random(3, 11, 1.0).unwrap();
        assert!(h.to_dense().trace().norm() < 1e-12);
    }

    #[test]
    fn conjugate_by_identity_is_noop() {
        let h = PairHamiltonian::random(3, 5, 1.0).unwrap();
        let c = h.conjugate(&PauliString::identity(3)).unwrap();
        assert_eq!(h, c);
    }

    #[test]
    fn conjugate_flips_anticommuting_field() {
        let mut h = PairHamiltonian::zero(2).unwrap();
        h.set_field(0, PauliAxis::X, 0.7).unwrap();
        let frame = PauliString::single(2, 0, PauliAxis::Z).unwrap();
        let c = h.conjugate(&frame).unwrap();
        assert_eq!(c.field(0, PauliAxis::X), -0.7);
    }

    #[test]
    fn conjugate_keeps_commuting_coupling() {
        let mut h = PairHamiltonian::zero(2).unwrap();
        h.set_coupling(0, 1, PauliAxis::X, PauliAxis::X, 0.3)
            .unwrap();
        let frame = PauliString::single(2, 0, PauliAxis::X).unwrap();
        let c = h.conjugate(&frame).unwrap();
        assert_eq!(c.coupling(0, 1, PauliAxis::X, PauliAxis::X), 0.3);
    }

    #[test]
    fn average_requires_unit_weight() {
        let h = PairHamiltonian::zero(2).unwrap();
        let err = PairHamiltonian::average(&[(0.5, h.clone()), (0.4, h.clone())]);
        assert!(matches!(err, Err(Error::WeightSum { .. })));
        let same = PairHamiltonian::average(&[(1.0, h.clone())]).unwrap();
        assert_eq!(same, h);
    }

    #[test]
    fn opposite_frames_cancel_field() {
        let mut h = PairHamiltonian::zero(2).unwrap();
        h.set_field(0, PauliAxis::X, 1.25).unwrap();
        let frame = PauliString::single(2, 0, PauliAxis::Z).unwrap();
        let avg =
            PairHamiltonian::average(&[(0.5, h.clone()), (0.5, h.conjugate(&frame).unwrap())])
                .unwrap();
        assert!(avg.is_zero());
    }

    #[test]
    fn isolated_term_scales_fields_only() {
        let mut h = PairHamiltonian::zero(3).unwrap();
        h.set_field(0, PauliAxis::X, 3.0).unwrap();
        h.set_coupling(0, 1, PauliAxis::X, PauliAxis::Z, 5.0)
            .unwrap();
        let t = h
            .isolated_term(0, 1, PauliAxis::X, PauliAxis::Z, 1.0)
            .unwrap();
        assert_eq!((t.a, t.b, t.c), (3.0, 0.0, 5.0));
        // at n = 3 the rescaled single-qubit weight is 1/3
        let t = h
            .isolated_term(0, 1, PauliAxis::X, PauliAxis::Z, rescaled_1q_weight(3))
            .unwrap();
        assert!((t.a - 1.0).abs() < 1e-15);
        assert_eq!(t.c, 5.0);
    }

    #[test]
    fn isolated_term_rejects_equal_qubits() {
        let h = PairHamiltonian::zero(3).unwrap();
        assert!(matches!(
            h.isolated_term(1, 1, PauliAxis::X, PauliAxis::Z, 1.0),
            Err(Error::DegeneratePair { qubit: 1 })
        ));
    }

    #[test]
    fn random_is_deterministic() {
        let a = PairHamiltonian::random(3, 1, 1.0).unwrap();
        let b = PairHamiltonian::random(3, 1, 1.0).unwrap();
        assert_eq!(a, b);
        let zero = PairHamiltonian::random(3, 1, 0.0).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn spread_bound_simple_cases() {
        let zero = PairHamiltonian::zero(2).unwrap();
        assert_eq!(zero.spread_bound(), 0.0);
        let mut h = PairHamiltonian::zero(2).unwrap();
        h.set_field(0, PauliAxis::Z, 1.0).unwrap();
        assert_eq!(h.spread_bound(), 2.0);
    }

    #[test]
    fn share_terms_rebuild_hamiltonian() {
        let h = PairHamiltonian::random(4, 23, 1.0).unwrap();
        let n = h.n();
        let w = pair_share_1q_weight(n);
        let mut acc = PairHamiltonian::zero(n).unwrap();
        for j in 0..n {
            for k in (j + 1)..n {
                for alpha in PauliAxis::ALL {
                    for beta in PauliAxis::ALL {
                        let t = h.isolated_term(j, k, alpha, beta, w).unwrap();
                        acc.single[j][alpha.index()] += t.a;
                        acc.single[k][beta.index()] += t.b;
                        acc.pair[pair_rank(n, j, k)][alpha.index()][beta.index()] += t.c;
                    }
                }
            }
        }
        for j in 0..n {
            for axis in PauliAxis::ALL {
                assert!((acc.field(j, axis) - h.field(j, axis)).abs() < 1e-12);
            }
        }
        for j in 0..n {
            for k in (j + 1)..n {
                for alpha in PauliAxis::ALL {
                    for beta in PauliAxis::ALL {
                        assert_eq!(
                            acc.coupling(j, k, alpha, beta),
                            h.coupling(j, k, alpha, beta)
                        );
                    }
                }
            }
        }
    }
}
