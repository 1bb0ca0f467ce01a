//! Pauli strings in bit-mask form and the trace decomposition of real
//! symmetric matrices into the Pauli basis.
//!
//! Qubit `q` is bit `q` of a computational-basis index. A string is stored as
//! two masks: `x_mask` marks qubits carrying X or Y, `z_mask` marks qubits
//! carrying Z or Y. Labels print qubit 0 leftmost.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Default magnitude below which decomposition weights are dropped.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-12;

/// Relative symmetry tolerance accepted by [`decompose`].
pub const SYMMETRY_TOL: f64 = 1e-10;

pub const MAX_QUBITS: usize = 30;

/// One of the four unit phases a Pauli string picks up on a basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    /// `i^k`
    pub fn from_quarter_turns(k: u32) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    /// Returns `self * z` without a complex multiply.
    #[inline]
    pub fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Phase::PlusOne => z,
            Phase::PlusI => Complex64::new(-z.im, z.re),
            Phase::MinusOne => -z,
            Phase::MinusI => Complex64::new(z.im, -z.re),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliSymbol {
    I,
    X,
    Y,
    Z,
}

impl PauliSymbol {
    fn as_char(self) -> char {
        match self {
            PauliSymbol::I => 'I',
            PauliSymbol::X => 'X',
            PauliSymbol::Y => 'Y',
            PauliSymbol::Z => 'Z',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
}

impl PauliString {
    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Dimension(format!(
                "a Pauli string needs 1..={MAX_QUBITS} qubits, got {n_qubits}"
            )));
        }
        let full = (1u64 << n_qubits) - 1;
        if x_mask & !full != 0 || z_mask & !full != 0 {
            return Err(Error::Dimension(format!(
                "masks ({x_mask:#b}, {z_mask:#b}) do not fit in {n_qubits} qubits"
            )));
        }
        Ok(Self {
            n_qubits,
            x_mask,
            z_mask,
        })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::new(n_qubits, 0, 0).expect("qubit count out of range")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    /// Qubits carrying a non-identity symbol.
    pub fn support_mask(&self) -> u64 {
        self.x_mask | self.z_mask
    }

    pub fn is_identity(&self) -> bool {
        self.support_mask() == 0
    }

    pub fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    pub fn symbol(&self, qubit: usize) -> PauliSymbol {
        let x = self.x_mask >> qubit & 1 == 1;
        let z = self.z_mask >> qubit & 1 == 1;
        match (x, z) {
            (false, false) => PauliSymbol::I,
            (true, false) => PauliSymbol::X,
            (false, true) => PauliSymbol::Z,
            (true, true) => PauliSymbol::Y,
        }
    }

    /// Action on a basis state: `P |row> = phase |col>`.
    ///
    /// `col = row ^ x_mask`, `phase = (-1)^popcount(row & z_mask) * i^popcount(x_mask & z_mask)`.
    /// Equivalently, row `col` of the matrix of `P` has its single nonzero entry
    /// `phase` in column `row`.
    #[inline]
    pub fn row_action(&self, row: usize) -> (usize, Phase) {
        let r = row as u64;
        let sign_flips = (r & self.z_mask).count_ones() * 2;
        let phase = Phase::from_quarter_turns(sign_flips + self.y_count());
        ((r ^ self.x_mask) as usize, phase)
    }

    pub fn label(&self) -> String {
        (0..self.n_qubits).map(|q| self.symbol(q).as_char()).collect()
    }

    /// Dense matrix of the string.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.n_qubits;
        let mut m = ComplexMatrix::zeros(dim);
        for row in 0..dim {
            let (col, phase) = self.row_action(row);
            m[(col, row)] = phase.to_complex();
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in s.chars().enumerate() {
            if q >= MAX_QUBITS {
                return Err(Error::Parse(format!("Pauli label `{s}` is too long")));
            }
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= 1 << q,
                'Z' => z |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                other => return Err(Error::Parse(format!("bad Pauli symbol `{other}` in `{s}`"))),
            }
        }
        Self::new(s.chars().count(), x, z)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Real part, keeping the layout.
    pub fn real_part(&self) -> DenseMatrix {
        let rows: Vec<Vec<f64>> = self
            .data
            .chunks(self.dim)
            .map(|r| r.iter().map(|z| z.re).collect())
            .collect();
        DenseMatrix::from_rows(&rows).expect("square by construction")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub pauli: PauliString,
    pub weight: f64,
}

/// Weighted Pauli strings summing to a matrix. The identity term, when
/// present, comes first; the rest are ordered by `(x_mask, z_mask)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliDecomposition {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliDecomposition {
    /// Validates and canonically orders a term list.
    pub fn from_terms(n_qubits: usize, mut terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            if t.pauli.n_qubits() != n_qubits {
                return Err(Error::Dimension(format!(
                    "term {} acts on {} qubits, expected {n_qubits}",
                    t.pauli,
                    t.pauli.n_qubits()
                )));
            }
            if !t.weight.is_finite() {
                return Err(Error::Argument(format!("weight of {} is not finite", t.pauli)));
            }
        }
        terms.sort_by_key(|t| (t.pauli.x_mask(), t.pauli.z_mask()));
        if let Some(w) = terms.windows(2).find(|w| w[0].pauli == w[1].pauli) {
            return Err(Error::Argument(format!("duplicate Pauli string {}", w[0].pauli)));
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight_of(&self, p: &PauliString) -> Option<f64> {
        self.terms.iter().find(|t| t.pauli == *p).map(|t| t.weight)
    }

    /// `sum_i g_i P_i` as a dense complex matrix.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = 1usize << self.n_qubits;
        let mut m = ComplexMatrix::zeros(dim);
        for t in &self.terms {
            for row in 0..dim {
                let (col, phase) = t.pauli.row_action(row);
                m[(col, row)] += phase.to_complex() * t.weight;
            }
        }
        m
    }

    /// Weight of the identity string: the energy of the fully mixed state.
    pub fn mixed_state_value(&self) -> f64 {
        self.terms
            .first()
            .filter(|t| t.pauli.is_identity())
            .map_or(0.0, |t| t.weight)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.terms)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let terms: Vec<PauliTerm> = serde_json::from_str(text)?;
        let n = terms
            .first()
            .map(|t| t.pauli.n_qubits())
            .ok_or_else(|| Error::Parse("decomposition has no terms".into()))?;
        Self::from_terms(n, terms)
    }
}

/// `tr(P H) / 2^n` for a real matrix `H`.
pub fn trace_weight(p: &PauliString, h: &DenseMatrix) -> Complex64 {
    let dim = h.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for row in 0..dim {
        // (P H)[col][col] picks up P[col][row] * H[row][col].
        let (col, phase) = p.row_action(row);
        acc += phase.apply(Complex64::new(h[(row, col)], 0.0));
    }
    acc / dim as f64
}

pub fn decompose(h: &DenseMatrix) -> Result<PauliDecomposition> {
    decompose_with_tol(h, DEFAULT_PRUNE_TOL)
}

/// Decomposes a real symmetric `2^n x 2^n` matrix into the Pauli basis,
/// dropping weights with `|g| <= prune_tol` (the identity term is always kept).
pub fn decompose_with_tol(h: &DenseMatrix, prune_tol: f64) -> Result<PauliDecomposition> {
    let dim = h.dim();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "matrix dimension {dim} is not a power of two >= 2"
        )));
    }
    h.ensure_symmetric(SYMMETRY_TOL)?;
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::Dimension(format!("{n} qubits exceeds the supported maximum")));
    }

    let terms: Vec<PauliTerm> = (0..dim as u64)
        .into_par_iter()
        .flat_map_iter(|x| {
            (0..dim as u64).filter_map(move |z| {
                let pauli = PauliString::new(n, x, z).expect("masks in range");
                let weight = trace_weight(&pauli, h).re;
                (pauli.is_identity() || weight.abs() > prune_tol).then_some(PauliTerm { pauli, weight })
            })
        })
        .collect();
    PauliDecomposition::from_terms(n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Single-qubit Paulis as explicit 2x2 matrices.
    fn explicit(symbol: char) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match symbol {
            'I' => [[l, o], [o, l]],
            'X' => [[o, l], [l, o]],
            'Y' => [[o, -i], [i, o]],
            'Z' => [[l, o], [o, -l]],
            _ => unreachable!(),
        }
    }

    #[test]
    fn row_action_examples() {
        let z: PauliString = "Z".parse().unwrap();
        assert_eq!(z.row_action(1), (1, Phase::MinusOne));
        let x: PauliString = "X".parse().unwrap();
        assert_eq!(x.row_action(0), (1, Phase::PlusOne));
        let y: PauliString = "Y".parse().unwrap();
        // Y|0> = i|1>: column 0 of [[0,-i],[i,0]].
        assert_eq!(explicit('Y')[1][0], Complex64::new(0.0, 1.0));
        assert_eq!(y.row_action(0), (1, Phase::PlusI));
        assert_eq!(y.row_action(1), (0, Phase::MinusI));
    }

    #[test]
    fn to_matrix_matches_kronecker_products() {
        for label in ["IX", "YZ", "XY", "ZZ", "YY", "IY"] {
            let p: PauliString = label.parse().unwrap();
            let m = p.to_matrix();
            let chars: Vec<char> = label.chars().collect();
            // qubit 1 is the high bit, so the Kronecker order is P1 (x) P0.
            let (hi, lo) = (explicit(chars[1]), explicit(chars[0]));
            for r in 0..4 {
                for c in 0..4 {
                    let expect = hi[r >> 1][c >> 1] * lo[r & 1][c & 1];
                    assert_eq!(m[(r, c)], expect, "{label} [{r}][{c}]");
                }
            }
        }
    }

    #[test]
    fn labels_round_trip() {
        let p: PauliString = "IXZY".parse().unwrap();
        assert_eq!(p.x_mask(), 0b1010);
        assert_eq!(p.z_mask(), 0b1100);
        assert_eq!(p.label(), "IXZY");
        assert!("IXA".parse::<PauliString>().is_err());
        assert!(PauliString::new(2, 0b100, 0).is_err());
    }

    #[test]
    fn decompose_chain_two() {
        let h = DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap();
        let d = decompose(&h).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.terms()[0].pauli.label(), "I");
        assert_abs_diff_eq!(d.terms()[0].weight, 2.0);
        assert_eq!(d.terms()[1].pauli.label(), "X");
        assert_abs_diff_eq!(d.terms()[1].weight, -1.0);
        assert_abs_diff_eq!(d.mixed_state_value(), 2.0);
    }

    #[test]
    fn decompose_identity_and_zero() {
        let d = decompose(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.terms()[0].weight, 1.0);

        let z = decompose(&DenseMatrix::zeros(2)).unwrap();
        assert_eq!(z.len(), 1);
        assert!(z.terms()[0].pauli.is_identity());
        assert_eq!(z.terms()[0].weight, 0.0);
        assert_eq!(z.mixed_state_value(), 0.0);
    }

    #[test]
    fn decompose_errors() {
        assert!(matches!(decompose(&DenseMatrix::identity(3)), Err(Error::Dimension(_))));
        let asym = DenseMatrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(decompose(&asym), Err(Error::Asymmetric { .. })));
    }

    #[test]
    fn reconstruct_examples() {
        let iz = PauliDecomposition::from_terms(
            1,
            vec![
                PauliTerm {
                    pauli: "Z".parse().unwrap(),
                    weight: 1.0,
                },
                PauliTerm {
                    pauli: "I".parse().unwrap(),
                    weight: 1.0,
                },
            ],
        )
        .unwrap();
        assert!(iz.terms()[0].pauli.is_identity());
        let m = iz.reconstruct();
        assert_eq!(
            m.real_part(),
            DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 0.0]]).unwrap()
        );

        let y = PauliDecomposition::from_terms(
            1,
            vec![PauliTerm {
                pauli: "Y".parse().unwrap(),
                weight: 1.0,
            }],
        )
        .unwrap();
        let m = y.reconstruct();
        let e = explicit('Y');
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(m[(r, c)], e[r][c]);
            }
        }
    }

    #[test]
    fn duplicate_terms_rejected() {
        let t = PauliTerm {
            pauli: "X".parse().unwrap(),
            weight: 1.0,
        };
        assert!(PauliDecomposition::from_terms(1, vec![t, t]).is_err());
    }

    #[test]
    fn json_labels() {
        let h = DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap();
        let d = decompose(&h).unwrap();
        let json = d.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v[1]["pauli"], "X");
        assert_eq!(v[1]["weight"], -1.0);
        assert_eq!(PauliDecomposition::from_json(&json).unwrap(), d);
    }

    #[test]
    fn chain_three_mixed_value() {
        let h = DenseMatrix::from_rows(&[[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
            .unwrap()
            .embed(4);
        assert_abs_diff_eq!(decompose(&h).unwrap().mixed_state_value(), 1.5, epsilon = 1e-15);
    }
}
