//! Single-qubit Pauli axes and multi-qubit Pauli strings.
//!
//! The identity is represented by absence: a [`PauliString`] stores only the
//! qubits on which it acts non-trivially. The three non-identity axes carry
//! the cyclic labeling x -> 0, y -> 1, z -> 2, so the successor map
//! x -> y -> z -> x is total and has order 3 by construction.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the three non-identity Pauli axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// Cyclic index: x -> 0, y -> 1, z -> 2.
    pub fn index(self) -> usize {
        match self {
            PauliAxis::X => 0,
            PauliAxis::Y => 1,
            PauliAxis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> PauliAxis {
        Self::ALL[i % 3]
    }

    /// Cyclic successor: x -> y -> z -> x.
    pub fn succ(self) -> PauliAxis {
        Self::from_index(self.index() + 1)
    }

    pub fn label(self) -> char {
        match self {
            PauliAxis::X => 'x',
            PauliAxis::Y => 'y',
            PauliAxis::Z => 'z',
        }
    }

    pub fn parse(c: char) -> Option<PauliAxis> {
        match c.to_ascii_lowercase() {
            'x' => Some(PauliAxis::X),
            'y' => Some(PauliAxis::Y),
            'z' => Some(PauliAxis::Z),
            _ => None,
        }
    }

    /// The 2x2 matrix of the axis.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            PauliAxis::X => [[zero, one], [one, zero]],
            PauliAxis::Y => [[zero, -i], [i, zero]],
            PauliAxis::Z => [[one, zero], [zero, -one]],
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Tensor product of Pauli axes over an `n`-qubit register, identity on every
/// qubit not listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    n: usize,
    axes: BTreeMap<usize, PauliAxis>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            n,
            axes: BTreeMap::new(),
        }
    }

    pub fn single(n: usize, qubit: usize, axis: PauliAxis) -> Result<Self> {
        Self::from_pairs(n, &[(qubit, axis)])
    }

    /// Builds a string from `(qubit, axis)` pairs. A qubit may carry at most
    /// one axis and every index must be below `n`.
    pub fn from_pairs(n: usize, pairs: &[(usize, PauliAxis)]) -> Result<Self> {
        let mut axes = BTreeMap::new();
        for &(qubit, axis) in pairs {
            if qubit >= n {
                return Err(Error::QubitIndex { index: qubit, n });
            }
            if axes.insert(qubit, axis).is_some() {
                return Err(Error::DuplicateQubit { qubit });
            }
        }
        Ok(PauliString { n, axes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        self.axes.is_empty()
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.axes.len()
    }

    pub fn axis_on(&self, qubit: usize) -> Option<PauliAxis> {
        self.axes.get(&qubit).copied()
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, PauliAxis)> + '_ {
        self.axes.iter().map(|(&q, &a)| (q, a))
    }

    /// +1 if the strings commute, -1 if they anticommute. The sign is set by
    /// the parity of sites where both act non-trivially with different axes.
    pub fn commutation_sign(&self, other: &PauliString) -> i8 {
        let mut differing = 0usize;
        for (&q, &a) in &self.axes {
            if let Some(b) = other.axis_on(q) {
                if a != b {
                    differing += 1;
                }
            }
        }
        if differing.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        self.commutation_sign(other) == 1
    }

    /// Site-wise product of two strings, discarding the scalar phase. As a
    /// conjugation frame only the axis pattern matters.
    pub fn compose(&self, other: &PauliString) -> PauliString {
        let n = self.n.max(other.n);
        let mut axes = self.axes.clone();
        for (&q, &b) in &other.axes {
            match axes.get(&q).copied() {
                None => {
                    axes.insert(q, b);
                }
                Some(a) if a == b => {
                    axes.remove(&q);
                }
                Some(a) => {
                    // the third axis: product of two distinct Paulis
                    let third = PauliAxis::from_index(3 - a.index() - b.index());
                    axes.insert(q, third);
                }
            }
        }
        PauliString { n, axes }
    }

    /// Same axis pattern viewed on a larger register.
    pub fn extended(&self, n: usize) -> Result<PauliString> {
        if n < self.n {
            return Err(Error::QubitIndex {
                index: self.n.saturating_sub(1),
                n,
            });
        }
        Ok(PauliString {
            n,
            axes: self.axes.clone(),
        })
    }

    /// Parses the dump notation, e.g. `X0.Z2`; `I` is the identity.
    pub fn parse(text: &str, n: usize) -> Result<PauliString> {
        let text = text.trim();
        if text.is_empty() || text == "I" {
            return Ok(PauliString::identity(n));
        }
        let mut pairs = Vec::new();
        for part in text.split('.') {
            let mut chars = part.chars();
            let axis = chars
                .next()
                .and_then(PauliAxis::parse)
                .ok_or_else(|| Error::ScheduleParse(format!("bad frame factor `{part}`")))?;
            let qubit: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::ScheduleParse(format!("bad qubit index in `{part}`")))?;
            pairs.push((qubit, axis));
        }
        PauliString::from_pairs(n, &pairs)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.axes.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self
            .axes
            .iter()
            .map(|(q, a)| format!("{}{}", a.label().to_ascii_uppercase(), q))
            .collect();
        write!(f, "{}", parts.join("."))
    }
}
