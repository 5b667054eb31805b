// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Pauli letters and signed Pauli strings.

use std::fmt;
use std::str::FromStr;

use super::{Mat, C64};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// (x, z) symplectic bits.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Product `a·b = i^k c`, returned as `(k, c)`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Pauli, b: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (a, b) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
        }
    }

    pub fn matrix(self) -> Mat {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let v = match self {
            Pauli::I => [o, z, z, o],
            Pauli::X => [z, o, o, z],
            Pauli::Y => [z, -i, i, z],
            Pauli::Z => [o, z, z, -o],
        };
        Mat::from_row_slice(2, 2, &v)
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A Pauli word with phase `i^phase`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    word: Vec<Pauli>,
    phase: u8,
}

impl PauliString {
    pub fn new(word: Vec<Pauli>) -> Self {
        PauliString { word, phase: 0 }
    }

    pub fn with_phase(word: Vec<Pauli>, phase: u8) -> Self {
        PauliString { word, phase: phase % 4 }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n])
    }

    /// Letter `p` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut w = vec![Pauli::I; n];
        w[q] = p;
        Self::new(w)
    }

    /// `Z` on the first `w` qubits.
    pub fn z_prefix(n: usize, w: usize) -> Self {
        let mut word = vec![Pauli::I; n];
        for l in word.iter_mut().take(w) {
            *l = Pauli::Z;
        }
        Self::new(word)
    }

    /// Enumerates all 4^n unsigned strings, index order `I<X<Y<Z` with qubit 0 most significant.
    pub fn all(n: usize) -> Vec<PauliString> {
        (0..4usize.pow(n as u32)).map(|k| Self::from_index(n, k)).collect()
    }

    pub fn from_index(n: usize, mut k: usize) -> Self {
        let mut w = vec![Pauli::I; n];
        for q in (0..n).rev() {
            w[q] = Pauli::ALL[k % 4];
            k /= 4;
        }
        Self::new(w)
    }

    pub fn index(&self) -> usize {
        self.word.iter().fold(0, |acc, p| acc * 4 + *p as usize)
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[Pauli] {
        &self.word
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_factor(&self) -> C64 {
        i_pow(self.phase)
    }

    /// Sign as ±1; `None` for imaginary phases.
    pub fn sign(&self) -> Option<f64> {
        match self.phase {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn weight(&self) -> usize {
        self.word.iter().filter(|p| **p != Pauli::I).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&q| self.word[q] != Pauli::I).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// The same word with phase +1.
    pub fn unsigned(&self) -> Self {
        Self::new(self.word.clone())
    }

    pub fn negate(&self) -> Self {
        Self::with_phase(self.word.clone(), self.phase + 2)
    }

    pub fn times_phase(&self, k: u8) -> Self {
        Self::with_phase(self.word.clone(), self.phase + k)
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n(), other.n(), "Pauli strings of different length");
        let mut phase = self.phase + other.phase;
        let word = self
            .word
            .iter()
            .zip(&other.word)
            .map(|(a, b)| {
                let (k, c) = Pauli::mul(*a, *b);
                phase += k;
                c
            })
            .collect();
        Self::with_phase(word, phase)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .word
            .iter()
            .zip(&other.word)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Bitmask of qubits carrying X or Y (qubit 0 is the top bit).
    pub fn x_mask(&self) -> usize {
        let n = self.n();
        (0..n).filter(|&q| self.word[q].bits().0).fold(0, |m, q| m | 1 << (n - 1 - q))
    }

    pub fn z_mask(&self) -> usize {
        let n = self.n();
        (0..n).filter(|&q| self.word[q].bits().1).fold(0, |m, q| m | 1 << (n - 1 - q))
    }

    /// Matrix element `⟨r|P|r ^ x_mask⟩`, including the global phase.
    pub fn row_coeff(&self, r: usize) -> C64 {
        let n = self.n();
        let mut k = self.phase as u32;
        for q in 0..n {
            let bit = (r >> (n - 1 - q)) & 1;
            match self.word[q] {
                Pauli::I | Pauli::X => {}
                Pauli::Z => k += 2 * bit as u32,
                // ⟨0|Y|1⟩ = −i, ⟨1|Y|0⟩ = +i
                Pauli::Y => k += if bit == 0 { 3 } else { 1 },
            }
        }
        i_pow((k % 4) as u8)
    }

    /// Dense 2^n × 2^n matrix.
    pub fn dense(&self) -> Mat {
        let d = 1usize << self.n();
        let xm = self.x_mask();
        let mut m = Mat::zeros(d, d);
        for r in 0..d {
            m[(r, r ^ xm)] = self.row_coeff(r);
        }
        m
    }

    /// `P ρ P†` via index permutation.
    pub fn conjugate_matrix(&self, rho: &Mat) -> Mat {
        let d = rho.nrows();
        let xm = self.x_mask();
        let coeffs: Vec<C64> = (0..d).map(|r| self.row_coeff(r)).collect();
        Mat::from_fn(d, d, |r, c| coeffs[r] * rho[(r ^ xm, c ^ xm)] * coeffs[c].conj())
    }

    /// `P ψ` for a state vector.
    pub fn apply_vec(&self, psi: &nalgebra::DVector<C64>) -> nalgebra::DVector<C64> {
        let xm = self.x_mask();
        nalgebra::DVector::from_fn(psi.len(), |r, _| self.row_coeff(r) * psi[r ^ xm])
    }

    /// Decomposes `m` as a phased Pauli string, if it is one.
    pub fn from_dense(m: &Mat, tol: f64) -> Option<PauliString> {
        let d = m.nrows();
        if d == 0 || !d.is_power_of_two() || m.ncols() != d {
            return None;
        }
        let n = d.trailing_zeros() as usize;
        // column 0 reveals the x pattern; diagonal of P·X-mask reveals z pattern
        let r0 = (0..d).max_by(|&a, &b| m[(a, 0)].norm().partial_cmp(&m[(b, 0)].norm()).unwrap())?;
        let xm = r0;
        let mut word = Vec::with_capacity(n);
        for q in 0..n {
            let bit = 1 << (n - 1 - q);
            let x = xm & bit != 0;
            // z bit from the relative sign between rows with this bit 0 and 1
            let a = m[(xm & !bit, (xm & !bit) ^ xm)];
            let b = m[(xm | bit, (xm | bit) ^ xm)];
            let ratio = if a.norm() > tol { b / a } else { return None };
            // Z and Y flip sign between the bit-0 and bit-1 rows; I and X do not
            let z = ratio.re < 0.0;
            word.push(Pauli::from_bits(x, z));
        }
        let bare = PauliString::new(word);
        let dim = d as f64;
        let overlap = (bare.dense().adjoint() * m).trace() / dim;
        let phase = (0..4u8).find(|&k| (i_pow(k) - overlap).norm() < 1e-6)?;
        let p = PauliString::with_phase(bare.word, phase);
        let diff = (p.dense() - m).iter().map(|z| z.norm()).fold(0.0, f64::max);
        (diff < tol).then_some(p)
    }
}

pub(crate) fn i_pow(k: u8) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}")?;
        for p in &self.word {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `XZI`, `+XZ`, `-YY`, `iZ`, `-iX`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        let word = rest
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(invalid(format!("bad Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if word.is_empty() {
            return Err(invalid("empty Pauli string"));
        }
        Ok(PauliString::with_phase(word, phase))
    }
}

/// Parses a string literal, panicking on malformed input. Intended for constants.
pub fn ps(s: &str) -> PauliString {
    s.parse().expect("valid Pauli literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kron_dense(p: &PauliString) -> Mat {
        let mut m = Mat::identity(1, 1);
        for l in p.word() {
            m = m.kronecker(&l.matrix());
        }
        m * p.phase_factor()
    }

    fn max_diff(a: &Mat, b: &Mat) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn dense_matches_kron() {
        for n in 1..=3 {
            for k in 0..4usize.pow(n as u32) {
                for ph in 0..4 {
                    let p = PauliString::from_index(n, k).times_phase(ph);
                    assert!(max_diff(&p.dense(), &kron_dense(&p)) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn symbolic_product_matches_dense_n2() {
        for a in PauliString::all(2) {
            for b in PauliString::all(2) {
                let ab = a.mul(&b);
                assert!(max_diff(&ab.dense(), &(a.dense() * b.dense())) < 1e-15, "{a} {b}");
                let dense_commute = max_diff(&(a.dense() * b.dense()), &(b.dense() * a.dense())) < 1e-12;
                assert_eq!(a.commutes_with(&b), dense_commute);
            }
        }
    }

    #[test]
    fn row_three_product_is_identity() {
        let prod = ps("XZ").dense() * ps("ZX").dense() * ps("YY").dense();
        assert!(max_diff(&prod, &Mat::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn from_dense_round_trip() {
        for n in 1..=3 {
            for k in 0..4usize.pow(n as u32) {
                for ph in 0..4 {
                    let p = PauliString::from_index(n, k).times_phase(ph);
                    assert_eq!(PauliString::from_dense(&p.dense(), 1e-9), Some(p));
                }
            }
        }
        let h = Mat::from_row_slice(2, 2, &[C64::new(1.0, 0.0); 4]);
        assert_eq!(PauliString::from_dense(&h, 1e-9), None);
    }

    #[test]
    fn conjugate_matrix_matches_dense() {
        let rho = Mat::from_fn(8, 8, |r, c| C64::new((r * 3 + c) as f64, (r as f64) - (c as f64)));
        for k in [0usize, 7, 27, 45, 63] {
            let p = PauliString::from_index(3, k).times_phase(1);
            let d = p.dense();
            assert!(max_diff(&p.conjugate_matrix(&rho), &(&d * &rho * d.adjoint())) < 1e-12);
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(ps("-iXY").to_string(), "-iXY");
        assert_eq!(ps("ZZ").sign(), Some(1.0));
        assert!("XQ".parse::<PauliString>().is_err());
        assert_eq!(ps("XIZY").weight(), 3);
    }
}
