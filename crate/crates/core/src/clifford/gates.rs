// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Named Clifford gates with both tableau and dense forms.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use super::tableau::CliffordTableau;
use crate::error::{invalid, Result};
use crate::qop::pauli::{Pauli, PauliString};
use crate::qop::{self, c, r, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    /// `S H S†`
    PhaseHadamard(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Cy(usize, usize),
}

use CliffordGate::*;

impl CliffordGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            H(q) | S(q) | Sdg(q) | X(q) | Y(q) | Z(q) | PhaseHadamard(q) => vec![q],
            Cnot(a, b) | Cz(a, b) | Cy(a, b) => vec![a, b],
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if qs.iter().any(|&q| q >= n) || (qs.len() == 2 && qs[0] == qs[1]) {
            return Err(invalid(format!("gate {self} does not fit on {n} qubits")));
        }
        Ok(())
    }

    /// Matrix on the gate's own qubits, in `qubits()` order.
    pub fn local_matrix(&self) -> Mat {
        let s = r(FRAC_1_SQRT_2);
        let one = Mat::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), r(0.0)]);
        let controlled = |p: Pauli| {
            let p1 = Mat::from_row_slice(2, 2, &[r(0.0), r(0.0), r(0.0), r(1.0)]);
            qop::tensor(&one, &qop::identity(2)) + qop::tensor(&p1, &p.matrix())
        };
        match *self {
            H(_) => Mat::from_row_slice(2, 2, &[s, s, s, -s]),
            S(_) => Mat::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), c(0.0, 1.0)]),
            Sdg(_) => Mat::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), c(0.0, -1.0)]),
            X(_) => Pauli::X.matrix(),
            Y(_) => Pauli::Y.matrix(),
            Z(_) => Pauli::Z.matrix(),
            PhaseHadamard(q) => S(q).local_matrix() * H(q).local_matrix() * Sdg(q).local_matrix(),
            Cnot(..) => controlled(Pauli::X),
            Cz(..) => controlled(Pauli::Z),
            Cy(..) => controlled(Pauli::Y),
        }
    }

    pub fn dense(&self, n: usize) -> Result<Mat> {
        self.check(n)?;
        qop::embed(&self.local_matrix(), &self.qubits(), n)
    }

    pub fn tableau(&self, n: usize) -> Result<CliffordTableau> {
        self.check(n)?;
        let mut t = CliffordTableau::identity(n);
        let one = match *self {
            H(q) => return Ok(lift(&t, q, &h_tableau())),
            S(q) => return Ok(lift(&t, q, &s_tableau())),
            Sdg(q) => return Ok(lift(&t, q, &s_tableau().inverse())),
            X(q) | Y(q) | Z(q) => {
                let p = match self {
                    X(_) => Pauli::X,
                    Y(_) => Pauli::Y,
                    _ => Pauli::Z,
                };
                let ps = PauliString::single(1, 0, p);
                let img = |g: Pauli| {
                    let gs = PauliString::single(1, 0, g);
                    if gs.commutes_with(&ps) {
                        gs
                    } else {
                        gs.negate()
                    }
                };
                let c1 = CliffordTableau::from_images(vec![img(Pauli::X)], vec![img(Pauli::Z)])?;
                return Ok(lift(&t, q, &c1));
            }
            PhaseHadamard(q) => {
                let c1 = s_tableau().inverse().then(&h_tableau()).then(&s_tableau());
                return Ok(lift(&t, q, &c1));
            }
            Cnot(a, b) => (a, b, Pauli::X),
            Cz(a, b) => (a, b, Pauli::Z),
            Cy(a, b) => (a, b, Pauli::Y),
        };
        // controlled-P via conjugation of the CNOT tableau by the basis change on the target
        let (ctl, tgt, p) = one;
        t = cnot_tableau(n, ctl, tgt);
        let basis = match p {
            Pauli::X => None,
            Pauli::Z => Some(H(tgt).tableau(n)?),
            _ => Some(S(tgt).tableau(n)?),
        };
        Ok(match basis {
            // C-P = B CNOT B† with B X B† = P
            Some(b) => b.inverse().then(&t).then(&b),
            None => t,
        })
    }
}

fn lift(id: &CliffordTableau, q: usize, one: &CliffordTableau) -> CliffordTableau {
    let n = id.n();
    let mut parts: Vec<CliffordTableau> = (0..n).map(|_| CliffordTableau::identity(1)).collect();
    parts[q] = one.clone();
    CliffordTableau::from_local(&parts)
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            H(q) => write!(f, "H({q})"),
            S(q) => write!(f, "S({q})"),
            Sdg(q) => write!(f, "Sdg({q})"),
            X(q) => write!(f, "X({q})"),
            Y(q) => write!(f, "Y({q})"),
            Z(q) => write!(f, "Z({q})"),
            PhaseHadamard(q) => write!(f, "SHSdg({q})"),
            Cnot(a, b) => write!(f, "CX({a},{b})"),
            Cz(a, b) => write!(f, "CZ({a},{b})"),
            Cy(a, b) => write!(f, "CY({a},{b})"),
        }
    }
}

pub(crate) fn h_tableau() -> CliffordTableau {
    CliffordTableau::from_images(vec![PauliString::single(1, 0, Pauli::Z)], vec![PauliString::single(1, 0, Pauli::X)])
        .expect("H tableau")
}

pub(crate) fn s_tableau() -> CliffordTableau {
    CliffordTableau::from_images(vec![PauliString::single(1, 0, Pauli::Y)], vec![PauliString::single(1, 0, Pauli::Z)])
        .expect("S tableau")
}

pub fn cnot_tableau(n: usize, control: usize, target: usize) -> CliffordTableau {
    assert!(control < n && target < n && control != target);
    let mut x_img: Vec<PauliString> = (0..n).map(|q| PauliString::single(n, q, Pauli::X)).collect();
    let mut z_img: Vec<PauliString> = (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect();
    x_img[control] = x_img[control].mul(&PauliString::single(n, target, Pauli::X));
    z_img[target] = z_img[target].mul(&PauliString::single(n, control, Pauli::Z));
    CliffordTableau::from_images(x_img, z_img).expect("CNOT tableau")
}

/// Tableau and dense unitary of a gate sequence applied left to right.
pub fn circuit_tableau(gates: &[CliffordGate], n: usize) -> Result<CliffordTableau> {
    gates.iter().try_fold(CliffordTableau::identity(n), |t, g| Ok(t.then(&g.tableau(n)?)))
}

pub fn circuit_dense(gates: &[CliffordGate], n: usize) -> Result<Mat> {
    gates.iter().try_fold(qop::identity(1 << n), |u, g| Ok(g.dense(n)? * u))
}

#[cfg(test)]
mod tests {
    use super::super::tableau::equal_up_to_phase;
    use super::*;

    #[test]
    fn tableau_and_dense_agree_for_every_gate() {
        let n = 3;
        let gates = [
            H(1),
            S(0),
            Sdg(2),
            X(1),
            Y(0),
            Z(2),
            PhaseHadamard(1),
            Cnot(2, 0),
            Cz(0, 1),
            Cy(1, 2),
            Cy(2, 0),
        ];
        for g in gates {
            let t = g.tableau(n).unwrap();
            let u = g.dense(n).unwrap();
            assert_eq!(CliffordTableau::from_dense(&u).unwrap(), t, "{g}");
            assert!(equal_up_to_phase(&t.to_dense(), &u, 1e-12), "{g}");
        }
        let t = circuit_tableau(&gates, n).unwrap();
        assert_eq!(CliffordTableau::from_dense(&circuit_dense(&gates, n).unwrap()).unwrap(), t);
    }

    #[test]
    fn phase_hadamard_is_an_involution() {
        let u = PhaseHadamard(0).local_matrix();
        assert!(qop::max_abs_diff(&(&u * &u), &qop::identity(2)) < 1e-14);
        assert!(Cnot(0, 0).tableau(2).is_err());
        assert!(H(3).dense(2).is_err());
    }
}
