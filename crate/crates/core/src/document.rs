//! JSON Hamiltonian documents: sparse coefficient lists keyed by qubit
//! indices and axes. The matrix of couplings and the vector of single-qubit
//! weights specify the instance uniquely; absent entries are zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::PairHamiltonian;
use crate::pauli::PauliAxis;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FieldEntry {
    pub j: usize,
    pub axis: PauliAxis,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CouplingEntry {
    pub j: usize,
    pub k: usize,
    pub alpha: PauliAxis,
    pub beta: PauliAxis,
    pub value: f64,
}

/// Serialized pair Hamiltonian.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HamiltonianDocument {
    pub n: usize,
    #[serde(default)]
    pub r: Vec<FieldEntry>,
    #[serde(rename = "J", default)]
    pub couplings: Vec<CouplingEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

impl HamiltonianDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialization cannot fail")
    }

    /// Validates and loads the coefficients. Coupling entries must satisfy
    /// `j < k`; duplicate keys are rejected.
    pub fn to_hamiltonian(&self) -> Result<PairHamiltonian> {
        let mut h = PairHamiltonian::zero(self.n).map_err(|e| Error::Document(e.to_string()))?;
        let mut seen_fields = std::collections::BTreeSet::new();
        for entry in &self.r {
            if entry.j >= self.n {
                return Err(Error::Document(format!(
                    "field entry on qubit {} out of range for n = {}",
                    entry.j, self.n
                )));
            }
            if !seen_fields.insert((entry.j, entry.axis)) {
                return Err(Error::Document(format!(
                    "duplicate field entry ({}, {})",
                    entry.j, entry.axis
                )));
            }
            h.set_field(entry.j, entry.axis, entry.value)
                .map_err(|e| Error::Document(e.to_string()))?;
        }
        let mut seen_couplings = std::collections::BTreeSet::new();
        for entry in &self.couplings {
            if entry.j >= entry.k {
                return Err(Error::Document(format!(
                    "coupling entry must have j < k, got ({}, {})",
                    entry.j, entry.k
                )));
            }
            if entry.k >= self.n {
                return Err(Error::Document(format!(
                    "coupling entry on qubit {} out of range for n = {}",
                    entry.k, self.n
                )));
            }
            if !seen_couplings.insert((entry.j, entry.k, entry.alpha, entry.beta)) {
                return Err(Error::Document(format!(
                    "duplicate coupling entry ({}, {}, {}, {})",
                    entry.j, entry.k, entry.alpha, entry.beta
                )));
            }
            h.set_coupling(entry.j, entry.k, entry.alpha, entry.beta, entry.value)
                .map_err(|e| Error::Document(e.to_string()))?;
        }
        Ok(h)
    }

    /// Sparse document listing the nonzero coefficients in index order.
    pub fn from_hamiltonian(h: &PairHamiltonian) -> Self {
        let n = h.n();
        let mut r = Vec::new();
        for j in 0..n {
            for axis in PauliAxis::ALL {
                let value = h.field(j, axis);
                if value != 0.0 {
                    r.push(FieldEntry { j, axis, value });
                }
            }
        }
        let mut couplings = Vec::new();
        for j in 0..n {
            for k in (j + 1)..n {
                for alpha in PauliAxis::ALL {
                    for beta in PauliAxis::ALL {
                        let value = h.coupling(j, k, alpha, beta);
                        if value != 0.0 {
                            couplings.push(CouplingEntry {
                                j,
                                k,
                                alpha,
                                beta,
                                value,
                            });
                        }
                    }
                }
            }
        }
        HamiltonianDocument {
            n,
            r,
            couplings,
            metadata: None,
        }
    }
}
