// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Small stabilizer codes with dense encoding, ancilla-based syndrome
//! extraction and lookup-table recovery.

pub mod distill;
pub mod transversal;

use rand::Rng;
use serde::Serialize;

use crate::clifford::gates::{circuit_dense, circuit_tableau, CliffordGate};
use crate::error::{invalid, Error, Result};
use crate::qop::pauli::{Pauli, PauliString};
use crate::qop::{self, Ket, Mat};

pub use distill::{distill_magic, distill_rounds, m_polarization, magic_state, DistillResult, MPolarization};
pub use transversal::{transversal_cnot_demo, CnotVariant, PropagatedError};

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerCode {
    pub name: &'static str,
    pub generators: Vec<PauliString>,
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    /// Maps `|ψ⟩` on `data_qubit` (others in `|0⟩`) into the codespace.
    pub encoder: Vec<CliffordGate>,
    pub data_qubit: usize,
    /// Errors the lookup decoder corrects, lowest weight first.
    pub correctable: Vec<PauliString>,
}

fn singles(n: usize, letters: &[Pauli]) -> Vec<PauliString> {
    let mut out = vec![PauliString::identity(n)];
    for q in 0..n {
        for &l in letters {
            out.push(PauliString::single(n, q, l));
        }
    }
    out
}

impl StabilizerCode {
    pub fn bit_flip() -> Self {
        use CliffordGate::*;
        StabilizerCode {
            name: "bit_flip",
            generators: vec![ps("ZZI"), ps("IZZ")],
            logical_x: ps("XXX"),
            logical_z: ps("ZZZ"),
            encoder: vec![Cnot(0, 1), Cnot(0, 2)],
            data_qubit: 0,
            correctable: singles(3, &[Pauli::X]),
        }
    }

    pub fn phase_flip() -> Self {
        use CliffordGate::*;
        StabilizerCode {
            name: "phase_flip",
            generators: vec![ps("XXI"), ps("IXX")],
            logical_x: ps("ZZZ"),
            logical_z: ps("XXX"),
            encoder: vec![Cnot(0, 1), Cnot(0, 2), H(0), H(1), H(2)],
            data_qubit: 0,
            correctable: singles(3, &[Pauli::Z]),
        }
    }

    /// The [[5,1,3]] code with generators `XZZXI` and cyclic shifts.
    pub fn five_qubit() -> Self {
        use CliffordGate::*;
        StabilizerCode {
            name: "five_qubit",
            generators: vec![ps("XZZXI"), ps("IXZZX"), ps("XIXZZ"), ps("ZXIXZ")],
            logical_x: ps("XXXXX"),
            logical_z: ps("ZZZZZ"),
            encoder: vec![
                Z(4),
                Cz(4, 0),
                Cz(4, 3),
                H(0),
                S(0),
                Cz(0, 1),
                Cz(0, 3),
                Cy(0, 4),
                H(1),
                Cz(1, 2),
                Cz(1, 3),
                Cnot(1, 4),
                H(2),
                Cz(2, 0),
                Cz(2, 1),
                Cnot(2, 4),
                H(3),
                S(3),
                Cz(3, 0),
                Cz(3, 2),
                Cy(3, 4),
            ],
            data_qubit: 4,
            correctable: singles(5, &[Pauli::X, Pauli::Y, Pauli::Z]),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "bit_flip" => Ok(Self::bit_flip()),
            "phase_flip" => Ok(Self::phase_flip()),
            "five_qubit" => Ok(Self::five_qubit()),
            _ => Err(invalid(format!("unknown code {name:?}"))),
        }
    }

    pub fn n(&self) -> usize {
        self.logical_x.n()
    }

    /// Checks commutation structure, the encoder, and that the correctable
    /// set has distinct syndromes.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let all = self.generators.iter().chain([&self.logical_x, &self.logical_z]);
        if all.clone().any(|g| g.n() != n) {
            return Err(invalid("code strings have inconsistent lengths"));
        }
        for a in &self.generators {
            if self.generators.iter().any(|b| !a.commutes_with(b)) {
                return Err(invalid("stabilizer generators must commute"));
            }
            if !a.commutes_with(&self.logical_x) || !a.commutes_with(&self.logical_z) {
                return Err(invalid("logical operators must commute with the stabilizers"));
            }
        }
        if self.logical_x.commutes_with(&self.logical_z) {
            return Err(invalid("logical X and Z must anticommute"));
        }
        // encoder: Z on non-data qubits maps into the stabilizer group, data X/Z to the logicals
        let t = circuit_tableau(&self.encoder, n)?;
        let psi = self.encode_ket(&qop::basis(2, 0))?;
        for g in &self.generators {
            if (qop::pauli_expectation(&qop::projector(&psi), g) - 1.0).abs() > 1e-10 {
                return Err(invalid(format!("encoder output is not stabilized by {g}")));
            }
        }
        for (img, logical) in [
            (t.conjugate(&PauliString::single(n, self.data_qubit, Pauli::X)), &self.logical_x),
            (t.conjugate(&PauliString::single(n, self.data_qubit, Pauli::Z)), &self.logical_z),
        ] {
            // img · logical must act as +1 on the codespace
            let prod = img.mul(logical);
            let ev = qop::pauli_expectation(&qop::projector(&psi), &prod.unsigned()) * prod.sign().unwrap_or(0.0);
            if (ev - 1.0).abs() > 1e-10 {
                return Err(invalid("encoder does not map the data operators onto the logicals"));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for e in &self.correctable {
            if !seen.insert(self.syndrome_of(e)) {
                return Err(invalid(format!("correctable error {e} shares a syndrome")));
            }
        }
        Ok(())
    }

    /// Bit `k` is 1 when the error anticommutes with generator `k`.
    pub fn syndrome_of(&self, error: &PauliString) -> Vec<u8> {
        self.generators.iter().map(|g| u8::from(!g.commutes_with(error))).collect()
    }

    pub fn encoder_dense(&self) -> Result<Mat> {
        circuit_dense(&self.encoder, self.n())
    }

    pub fn encode_ket(&self, psi: &Ket) -> Result<Ket> {
        if psi.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: psi.len() });
        }
        let n = self.n();
        let mut full = Ket::zeros(1 << n);
        let bit = qop::bit_of(self.data_qubit, n);
        full[0] = psi[0];
        full[1 << bit] = psi[1];
        Ok(self.encoder_dense()? * full)
    }

    /// Encoded density operator for the single-qubit state `psi`.
    pub fn encode(&self, psi: &Ket) -> Result<Mat> {
        Ok(qop::projector(&self.encode_ket(psi)?))
    }

    /// Inverse encoder followed by a partial trace onto the data qubit.
    pub fn decode(&self, rho: &Mat) -> Result<Mat> {
        let e = self.encoder_dense()?;
        let back = e.adjoint() * rho * e;
        qop::partial_trace(&back, &[self.data_qubit])
    }

    /// Minimum-weight correctable Pauli with the given syndrome.
    pub fn recover(&self, syndrome: &[u8]) -> Result<PauliString> {
        if syndrome.len() != self.generators.len() || syndrome.iter().any(|&b| b > 1) {
            return Err(invalid("malformed syndrome"));
        }
        self.correctable
            .iter()
            .find(|e| self.syndrome_of(e) == syndrome)
            .cloned()
            .ok_or_else(|| invalid(format!("syndrome {syndrome:?} is outside the lookup table")))
    }

    /// Expected state after one round of syndrome extraction and recovery,
    /// averaged over measurement outcomes.
    pub fn correction_cycle(&self, rho: &Mat) -> Result<Mat> {
        let mut acc = Mat::zeros(rho.nrows(), rho.ncols());
        for b in syndrome_projections(self, rho)? {
            let fix = self.recover(&b.bits)?;
            acc += fix.conjugate_matrix(&b.state) * qop::r(b.probability);
        }
        Ok(acc)
    }
}

fn ps(s: &str) -> PauliString {
    s.parse().expect("literal Pauli string")
}

#[derive(Debug, Clone)]
pub struct SyndromeOutcome {
    pub bits: Vec<u8>,
    pub probability: f64,
    /// Normalized post-measurement state of the code qubits.
    pub state: Mat,
}

/// Runs the ancilla circuit (`H`, controlled generator letters, `H` per
/// ancilla) and returns every outcome with nonzero probability.
pub fn syndrome_branches(code: &StabilizerCode, rho: &Mat) -> Result<Vec<SyndromeOutcome>> {
    let n = code.n();
    let m = code.generators.len();
    if rho.nrows() != 1 << n || !rho.is_square() {
        return Err(Error::DimensionMismatch { expected: 1 << n, got: rho.nrows() });
    }
    let total = n + m;
    let mut anc0 = Mat::zeros(1 << m, 1 << m);
    anc0[(0, 0)] = qop::r(1.0);
    let mut state = qop::tensor(rho, &anc0);
    let h = CliffordGate::H(0).local_matrix();
    for (k, g) in code.generators.iter().enumerate() {
        let a = n + k;
        state = qop::apply_local(&state, &h, &[a], total)?;
        for (q, letter) in g.word().iter().enumerate() {
            let gate = match letter {
                Pauli::I => continue,
                Pauli::X => CliffordGate::Cnot(a, q),
                Pauli::Y => CliffordGate::Cy(a, q),
                Pauli::Z => CliffordGate::Cz(a, q),
            };
            state = qop::apply_local(&state, &gate.local_matrix(), &[a, q], total)?;
        }
        if g.sign() == Some(-1.0) {
            state = qop::apply_local(&state, &Pauli::Z.matrix(), &[a], total)?;
        }
        state = qop::apply_local(&state, &h, &[a], total)?;
    }
    let mut out = Vec::new();
    let da = 1usize << m;
    for s in 0..da {
        // ancilla k holds bit (m − 1 − k) of s
        let block = Mat::from_fn(1 << n, 1 << n, |i, j| state[(i * da + s, j * da + s)]);
        let p = block.trace().re;
        if p > 1e-14 {
            let bits = (0..m).map(|k| (s >> (m - 1 - k) & 1) as u8).collect();
            out.push(SyndromeOutcome { bits, probability: p, state: block / qop::r(p) });
        }
    }
    Ok(out)
}

/// Same outcomes as [`syndrome_branches`], computed with the code-space
/// projectors `Π_k (I ± g_k)/2` instead of explicit ancillas.
pub fn syndrome_projections(code: &StabilizerCode, rho: &Mat) -> Result<Vec<SyndromeOutcome>> {
    let n = code.n();
    let d = 1usize << n;
    if rho.nrows() != d || !rho.is_square() {
        return Err(Error::DimensionMismatch { expected: d, got: rho.nrows() });
    }
    let m = code.generators.len();
    let dense: Vec<Mat> = code.generators.iter().map(|g| g.dense()).collect();
    let mut out = Vec::new();
    for s in 0..1usize << m {
        let bits: Vec<u8> = (0..m).map(|k| (s >> (m - 1 - k) & 1) as u8).collect();
        let mut proj = qop::identity(d);
        for (g, &b) in dense.iter().zip(&bits) {
            let sign = if b == 0 { 0.5 } else { -0.5 };
            proj = (&proj * qop::r(0.5)) + g * &proj * qop::r(sign);
        }
        let post = &proj * rho * &proj;
        let p = post.trace().re;
        if p > 1e-14 {
            out.push(SyndromeOutcome { bits, probability: p, state: post / qop::r(p) });
        }
    }
    Ok(out)
}

/// Projective syndrome measurement with sampled outcome.
pub fn syndrome_extract<R: Rng + ?Sized>(code: &StabilizerCode, rho: &Mat, rng: &mut R) -> Result<SyndromeOutcome> {
    let branches = syndrome_branches(code, rho)?;
    let mut u: f64 = rng.random::<f64>() * branches.iter().map(|b| b.probability).sum::<f64>();
    let last = branches.len() - 1;
    for (i, b) in branches.into_iter().enumerate() {
        u -= b.probability;
        if u <= 0.0 || i == last {
            return Ok(b);
        }
    }
    unreachable!("branch list is nonempty")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LogicalGate {
    I,
    X,
    H,
}

impl LogicalGate {
    pub fn matrix(self) -> Mat {
        match self {
            LogicalGate::I => qop::identity(2),
            LogicalGate::X => Pauli::X.matrix(),
            LogicalGate::H => CliffordGate::H(0).local_matrix(),
        }
    }
}

/// Identity error plus `X`, `Z` and `XZ` (i.e. `Y` up to phase) on every qubit.
pub fn error_ensemble(n: usize) -> Vec<PauliString> {
    singles(n, &[Pauli::X, Pauli::Z, Pauli::Y])
}

/// Fidelities `(uncorrected, corrected)` of encode, ideal logical gate,
/// `error`, then decode with or without a correction round.
pub fn logical_gate_cycle(code: &StabilizerCode, gate: LogicalGate, error: &PauliString, psi: &Ket) -> Result<(f64, f64)> {
    if error.n() != code.n() {
        return Err(Error::DimensionMismatch { expected: code.n(), got: error.n() });
    }
    let e = code.encoder_dense()?;
    let g_local = gate.matrix();
    let logical = &e * qop::embed(&g_local, &[code.data_qubit], code.n())? * e.adjoint();
    let rho = qop::conjugate(&code.encode(psi)?, &logical);
    let rho = error.conjugate_matrix(&rho);
    let want = qop::projector(&(g_local * psi));
    let fid = |r: &Mat| -> Result<f64> { Ok(qop::trace_product(&want, &code.decode(r)?).re) };
    Ok((fid(&rho)?, fid(&code.correction_cycle(&rho)?)?))
}

/// The six Pauli eigenstates, a 2-design for averaging.
pub fn cardinal_states() -> Vec<Ket> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let k = |a: qop::C64, b: qop::C64| Ket::from_vec(vec![a, b]);
    vec![
        k(qop::r(1.0), qop::r(0.0)),
        k(qop::r(0.0), qop::r(1.0)),
        k(qop::r(s), qop::r(s)),
        k(qop::r(s), qop::r(-s)),
        k(qop::r(s), qop::c(0.0, s)),
        k(qop::r(s), qop::c(0.0, -s)),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct GateCycleRow {
    pub error: String,
    pub f_uncorrected: f64,
    pub f_corrected: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateCycleSummary {
    pub code: &'static str,
    pub gate: LogicalGate,
    pub rows: Vec<GateCycleRow>,
    pub mean_uncorrected: f64,
    pub mean_corrected: f64,
}

/// Averages [`logical_gate_cycle`] over [`error_ensemble`] and the cardinal states.
pub fn logical_gate_ensemble(code: &StabilizerCode, gate: LogicalGate) -> Result<GateCycleSummary> {
    let states = cardinal_states();
    let mut rows = Vec::new();
    for err in error_ensemble(code.n()) {
        let (mut fu, mut fc) = (0.0, 0.0);
        for psi in &states {
            let (u, c) = logical_gate_cycle(code, gate, &err, psi)?;
            fu += u;
            fc += c;
        }
        let k = states.len() as f64;
        rows.push(GateCycleRow { error: err.to_string(), f_uncorrected: fu / k, f_corrected: fc / k });
    }
    let m = rows.len() as f64;
    Ok(GateCycleSummary {
        code: code.name,
        gate,
        mean_uncorrected: rows.iter().map(|r| r.f_uncorrected).sum::<f64>() / m,
        mean_corrected: rows.iter().map(|r| r.f_corrected).sum::<f64>() / m,
        rows,
    })
}
