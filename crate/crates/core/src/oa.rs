//! Strength-2 orthogonal arrays over the symbol set {1, x, y, z}, built from
//! linear functionals on GF(4)^s.
//!
//! Rows are the pairwise linearly independent functionals (one representative
//! per scalar class, first nonzero coordinate normalized to 1), columns run
//! over all of GF(4)^s. Any two distinct rows form a surjective linear map
//! onto GF(4)^2, so every ordered symbol pair shows up exactly d/16 times:
//! the balance that drives multi-qubit decoupling.

use crate::error::{Error, Result};
use crate::pauli::PauliAxis;

/// Element of GF(4) = {0, 1, w, w^2} encoded as 0..=3; addition is xor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf4(pub u8);

#[allow(clippy::should_implement_trait)] // field ops stay plain methods
impl Gf4 {
    pub fn add(self, other: Gf4) -> Gf4 {
        Gf4(self.0 ^ other.0)
    }

    pub fn mul(self, other: Gf4) -> Gf4 {
        // w^2 = w + 1
        const TABLE: [[u8; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
        Gf4(TABLE[self.0 as usize][other.0 as usize])
    }

    /// Decoupling symbol carried by this field element: 0 is the identity
    /// frame, the nonzero elements map to x, y, z in order.
    pub fn symbol(self) -> Option<PauliAxis> {
        match self.0 {
            0 => None,
            v => Some(PauliAxis::from_index(v as usize - 1)),
        }
    }
}

/// Rows of decoupling symbols, one per qubit, of common length `d`.
#[derive(Debug, Clone)]
pub struct OrthogonalArray {
    rows: Vec<Vec<Option<PauliAxis>>>,
    length: usize,
}

/// Largest supported row count: (4^4 - 1) / 3 functional classes.
pub const MAX_ROWS: usize = 85;

/// Builds the array with the minimal column count `d = 4^s` such that
/// `(4^s - 1) / 3 >= q` rows exist.
pub fn build_orthogonal_array(q: usize) -> Result<OrthogonalArray> {
    if q == 0 || q > MAX_ROWS {
        return Err(Error::ArraySize {
            requested: q,
            max: MAX_ROWS,
        });
    }
    let mut s = 1usize;
    while (4usize.pow(s as u32) - 1) / 3 < q {
        s += 1;
    }
    let d = 4usize.pow(s as u32);

    // canonical functionals: first nonzero coordinate equals 1, enumerated by
    // their base-4 code
    let mut functionals: Vec<Vec<Gf4>> = Vec::with_capacity(q);
    'outer: for code in 1..d {
        let coeffs = digits(code, s);
        let first_nonzero = coeffs.iter().find(|c| c.0 != 0).unwrap();
        if first_nonzero.0 != 1 {
            continue 'outer;
        }
        functionals.push(coeffs);
        if functionals.len() == q {
            break;
        }
    }
    debug_assert_eq!(functionals.len(), q);

    let rows = functionals
        .iter()
        .map(|coeffs| {
            (0..d)
                .map(|col| {
                    let point = digits(col, s);
                    let mut acc = Gf4(0);
                    for (c, t) in coeffs.iter().zip(&point) {
                        acc = acc.add(c.mul(*t));
                    }
                    acc.symbol()
                })
                .collect()
        })
        .collect();
    Ok(OrthogonalArray { rows, length: d })
}

fn digits(mut code: usize, s: usize) -> Vec<Gf4> {
    (0..s)
        .map(|_| {
            let digit = Gf4((code % 4) as u8);
            code /= 4;
            digit
        })
        .collect()
}

impl OrthogonalArray {
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn symbol(&self, row: usize, col: usize) -> Option<PauliAxis> {
        self.rows[row][col]
    }

    /// Exhaustive strength-2 check: every ordered symbol pair appears exactly
    /// `d / 16` times across any two distinct rows.
    pub fn verify_strength2(&self) -> bool {
        let expected = self.length / 16;
        for i in 0..self.rows.len() {
            for j in (i + 1)..self.rows.len() {
                let mut counts = [[0usize; 4]; 4];
                for col in 0..self.length {
                    counts[symbol_code(self.rows[i][col])][symbol_code(self.rows[j][col])] += 1;
                }
                if counts.iter().flatten().any(|&c| c != expected) {
                    return false;
                }
            }
        }
        true
    }

    /// Single-row balance: each of the four symbols appears `d / 4` times.
    pub fn verify_row_balance(&self) -> bool {
        let expected = self.length / 4;
        self.rows.iter().all(|row| {
            let mut counts = [0usize; 4];
            for &sym in row {
                counts[symbol_code(sym)] += 1;
            }
            counts.iter().all(|&c| c == expected)
        })
    }
}

fn symbol_code(sym: Option<PauliAxis>) -> usize {
    match sym {
        None => 0,
        Some(a) => a.index() + 1,
    }
}
