//! Dense complex linear algebra over few-qubit Hilbert spaces.
//!
//! Everything is stored full and row-major; dimensions stay at desk scale
//! (2^13 at most, a few dozen in practice), so clarity wins over packing.
//! The Hermitian eigensolver is a cyclic Jacobi iteration with complex
//! rotations and doubles as the exact-diagonalization oracle for every other
//! layer of the crate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Tolerance for "operator is Hermitian" checks on solver inputs.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Off-diagonal Frobenius norm at which the Jacobi iteration stops.
const JACOBI_THRESHOLD: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 128;

/// Square complex operator on a 2^k-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

#[allow(clippy::should_implement_trait)] // plain methods keep call sites borrow-friendly
impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        op
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "rows must form a square matrix");
            entries.extend_from_slice(row);
        }
        DenseOperator { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Tensor-product embedding of a Pauli string into its own register size.
    pub fn embed(p: &PauliString) -> Self {
        let n = p.n();
        let dim = 1usize << n;
        let mut op = Self::zeros(dim);
        // Flip mask: X and Y toggle the bit of their qubit.
        let mut flip = 0usize;
        for (q, a) in p.support() {
            if a != crate::pauli::PauliAxis::Z {
                flip |= 1 << q;
            }
        }
        for col in 0..dim {
            let row = col ^ flip;
            let mut amp = Complex64::new(1.0, 0.0);
            for (q, a) in p.support() {
                let cb = (col >> q) & 1;
                let rb = (row >> q) & 1;
                let m = a.matrix();
                amp *= m[rb][cb];
            }
            op.set(row, col, amp);
        }
        op
    }

    pub fn mul(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim, "operator dimensions must match");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.entries[k * d..(k + 1) * d];
                let out_row = &mut out.entries[i * d..(i + 1) * d];
                for (o, b) in out_row.iter_mut().zip(row.iter()) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        DenseOperator {
            dim: self.dim,
            entries,
        }
    }

    pub fn sub(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        DenseOperator {
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, factor: Complex64) -> DenseOperator {
        DenseOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> DenseOperator {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn dagger(&self) -> DenseOperator {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        out
    }

    /// Kronecker product; `self` supplies the most significant index block.
    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        let da = self.dim;
        let db = other.dim;
        let d = da * db;
        let mut out = Self::zeros(d);
        for ia in 0..da {
            for ja in 0..da {
                let a = self.entries[ia * da + ja];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for ib in 0..db {
                    for jb in 0..db {
                        out.entries[(ia * db + ib) * d + ja * db + jb] =
                            a * other.entries[ib * db + jb];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                let diff = self.entries[i * d + j] - self.entries[j * d + i].conj();
                dev = dev.max(diff.norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() < tol
    }

    pub fn unitary_deviation(&self) -> f64 {
        self.dagger()
            .mul(self)
            .sub(&DenseOperator::identity(self.dim))
            .max_abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_deviation() < tol
    }

    /// `self` raised to a nonnegative integer power by binary exponentiation.
    pub fn pow(&self, mut exponent: usize) -> DenseOperator {
        let mut base = self.clone();
        let mut acc = DenseOperator::identity(self.dim);
        while exponent > 0 {
            if exponent & 1 == 1 {
                acc = acc.mul(&base);
            }
            exponent >>= 1;
            if exponent > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        self.entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }
}

/// Embeds a 2x2 gate acting on one qubit of an `n_total`-qubit register.
pub fn embed_one_qubit(gate: &DenseOperator, qubit: usize, n_total: usize) -> DenseOperator {
    assert_eq!(gate.dim(), 2, "single-qubit gate must be 2x2");
    assert!(qubit < n_total);
    let dim = 1usize << n_total;
    let bit = 1usize << qubit;
    let mut out = DenseOperator::zeros(dim);
    for col in 0..dim {
        let cb = (col >> qubit) & 1;
        for rb in 0..2 {
            let row = (col & !bit) | (rb << qubit);
            out.set(row, col, gate.at(rb, cb));
        }
    }
    out
}

/// exp(-i P theta) for a Pauli string `P`, using P^2 = 1:
/// cos(theta) 1 - i sin(theta) P.
pub fn pauli_exp(p: &PauliString, theta: f64) -> DenseOperator {
    let dim = 1usize << p.n();
    let id = DenseOperator::identity(dim).scale(Complex64::new(theta.cos(), 0.0));
    let rot = DenseOperator::embed(p).scale(Complex64::new(0.0, -theta.sin()));
    id.add(&rot)
}

/// Eigendecomposition of a Hermitian operator: ascending eigenvalues and the
/// unitary whose columns are the matching eigenvectors.
pub fn hermitian_eig(a: &DenseOperator) -> Result<(Vec<f64>, DenseOperator)> {
    let deviation = a.hermitian_deviation();
    if deviation >= HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let d = a.dim();
    // Work on the symmetrized copy so roundoff asymmetry cannot bias rotations.
    let mut m = DenseOperator::zeros(d);
    for i in 0..d {
        for j in 0..d {
            m.set(i, j, (a.at(i, j) + a.at(j, i).conj()) * 0.5);
        }
    }
    let mut v = DenseOperator::identity(d);

    let mut off = off_diagonal_norm(&m);
    let mut sweeps = 0;
    while off >= JACOBI_THRESHOLD {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::EigConvergence { sweeps, off });
        }
        for p in 0..d {
            for q in (p + 1)..d {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&m);
    }

    let mut order: Vec<usize> = (0..d).collect();
    let eigen: Vec<f64> = (0..d).map(|i| m.at(i, i).re).collect();
    order.sort_by(|&i, &j| eigen[i].partial_cmp(&eigen[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eigen[i]).collect();
    let mut vectors = DenseOperator::zeros(d);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..d {
            vectors.set(row, col, v.at(row, src));
        }
    }
    Ok((values, vectors))
}

fn off_diagonal_norm(m: &DenseOperator) -> f64 {
    let d = m.dim();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                sum += m.at(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation annihilating the (p, q) element of `m`,
/// accumulated into `v`.
fn jacobi_rotate(m: &mut DenseOperator, v: &mut DenseOperator, p: usize, q: usize) {
    let apq = m.at(p, q);
    let r = apq.norm();
    if r < 1e-300 {
        return;
    }
    let phase = apq / r;
    let app = m.at(p, p).re;
    let aqq = m.at(q, q).re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // 2x2 eigenvector block: [[c, s], [-s conj(phase), c conj(phase)]]
    let vpp = Complex64::new(c, 0.0);
    let vpq = Complex64::new(s, 0.0);
    let vqp = -phase.conj() * s;
    let vqq = phase.conj() * c;

    let d = m.dim();
    // columns: M <- M V
    for i in 0..d {
        let mip = m.at(i, p);
        let miq = m.at(i, q);
        m.set(i, p, mip * vpp + miq * vqp);
        m.set(i, q, mip * vpq + miq * vqq);
    }
    // rows: M <- V† M
    for i in 0..d {
        let mpi = m.at(p, i);
        let mqi = m.at(q, i);
        m.set(p, i, vpp.conj() * mpi + vqp.conj() * mqi);
        m.set(q, i, vpq.conj() * mpi + vqq.conj() * mqi);
    }
    // eigenvectors: V <- V V_rot
    for i in 0..d {
        let vip = v.at(i, p);
        let viq = v.at(i, q);
        v.set(i, p, vip * vpp + viq * vqp);
        v.set(i, q, vip * vpq + viq * vqq);
    }
}

/// exp(-i A t) for Hermitian `A`, via the eigendecomposition.
pub fn expm_i(a: &DenseOperator, t: f64) -> Result<DenseOperator> {
    let (values, vectors) = hermitian_eig(a)?;
    let d = a.dim();
    let phases: Vec<Complex64> = values
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -lambda * t))
        .collect();
    let mut out = DenseOperator::zeros(d);
    // V diag(e^{-i λ t}) V†
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, phase) in phases.iter().enumerate() {
                acc += vectors.at(i, k) * phase * vectors.at(j, k).conj();
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Largest singular value, computed as the square root of the top eigenvalue
/// of A†A.
pub fn spectral_norm(a: &DenseOperator) -> f64 {
    let gram = a.dagger().mul(a);
    match hermitian_eig(&gram) {
        Ok((values, _)) => values.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
        // Gram matrices are Hermitian by construction; this path is unreachable
        // short of NaN input, where the Frobenius norm is as good an answer.
        Err(_) => a.frobenius_norm(),
    }
}

/// Pure state on a 2^k-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() >= 1e-10 {
            return Err(Error::StateNorm { norm });
        }
        Ok(QuantumState {
            dim: amplitudes.len(),
            amplitudes,
        })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::QubitIndex { index, n: n_qubits });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { dim, amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Mixed state: Hermitian, unit-trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: DenseOperator,
}

impl DensityMatrix {
    pub fn new(op: DenseOperator) -> Result<Self> {
        let dev = op.hermitian_deviation();
        if dev >= 1e-10 {
            return Err(Error::InvalidDensity {
                reason: format!("not Hermitian (deviation {dev:.3e})"),
            });
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() >= 1e-10 || tr.im.abs() >= 1e-10 {
            return Err(Error::InvalidDensity {
                reason: format!("trace {tr} is not 1"),
            });
        }
        let (values, _) = hermitian_eig(&op).map_err(|e| Error::InvalidDensity {
            reason: e.to_string(),
        })?;
        if values.first().copied().unwrap_or(0.0) < -1e-9 {
            return Err(Error::InvalidDensity {
                reason: format!("negative eigenvalue {:.3e}", values[0]),
            });
        }
        Ok(DensityMatrix { op })
    }

    pub fn from_pure(state: &QuantumState) -> Self {
        let d = state.dim();
        let mut op = DenseOperator::zeros(d);
        for i in 0..d {
            for j in 0..d {
                op.set(i, j, state.amplitudes[i] * state.amplitudes[j].conj());
            }
        }
        DensityMatrix { op }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        DensityMatrix {
            op: DenseOperator::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.op
    }
}
