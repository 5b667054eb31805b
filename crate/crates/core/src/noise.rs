// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantum channels: Kraus sets, Pauli channels, relaxation and gradient
//! dephasing.

use crate::error::{invalid, Error, Result};
use crate::qop::pauli::{Pauli, PauliString};
use crate::qop::{self, apply_local, identity, max_abs_diff, r, Mat, ONE};
use crate::spin::SpinSystem;

/// A completely positive map on `n` qubits.
#[derive(Debug, Clone)]
pub struct Channel {
    n: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Identity,
    Unitary(Mat),
    Kraus(Vec<Mat>),
    Pauli(Vec<(PauliString, f64)>),
    /// `(1 − p) ρ + p Tr(ρ) I/d`
    Depolarizing(f64),
    Local { qubits: Vec<usize>, kraus: Vec<Mat> },
    /// Applied left to right.
    Composite(Vec<Channel>),
}

fn dim_of(m: &Mat) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::InvalidOperator("square"));
    }
    qop::num_qubits(m.nrows())
}

fn kraus_deviation(ops: &[Mat]) -> f64 {
    let d = ops[0].nrows();
    let sum = ops.iter().fold(Mat::zeros(d, d), |acc, k| acc + k.adjoint() * k);
    max_abs_diff(&sum, &identity(d))
}

impl Channel {
    pub fn identity(n: usize) -> Channel {
        Channel { n, kind: Kind::Identity }
    }

    pub fn unitary(u: Mat) -> Result<Channel> {
        let n = dim_of(&u)?;
        qop::validate_unitary(&u, qop::Slack::default())?;
        Ok(Channel { n, kind: Kind::Unitary(u) })
    }

    /// General Kraus set; rejects incomplete sets.
    pub fn kraus(ops: Vec<Mat>) -> Result<Channel> {
        let first = ops.first().ok_or_else(|| invalid("empty Kraus set"))?;
        let n = dim_of(first)?;
        if ops.iter().any(|k| k.shape() != first.shape()) {
            return Err(invalid("Kraus operators of different shapes"));
        }
        let dev = kraus_deviation(&ops);
        if dev > 1e-10 {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Channel { n, kind: Kind::Kraus(ops) })
    }

    /// Pauli channel `ρ ↦ Σ p_P P ρ P`. Duplicate words are merged.
    pub fn pauli(terms: Vec<(PauliString, f64)>) -> Result<Channel> {
        let n = terms.first().ok_or_else(|| invalid("empty Pauli channel"))?.0.n();
        let mut merged: Vec<(PauliString, f64)> = Vec::new();
        for (p, w) in terms {
            if p.n() != n {
                return Err(invalid("Pauli strings of different length"));
            }
            if !(w >= 0.0) {
                return Err(invalid(format!("negative probability {w} for {p}")));
            }
            let p = p.unsigned();
            match merged.iter_mut().find(|(q, _)| *q == p) {
                Some(slot) => slot.1 += w,
                None => merged.push((p, w)),
            }
        }
        let total: f64 = merged.iter().map(|t| t.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::NotTracePreserving((total - 1.0).abs()));
        }
        Ok(Channel { n, kind: Kind::Pauli(merged) })
    }

    pub fn depolarizing(n: usize, p: f64) -> Result<Channel> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("depolarizing strength {p} outside [0, 1]")));
        }
        Ok(Channel { n, kind: Kind::Depolarizing(p) })
    }

    /// Kraus set acting on a subset of the qubits.
    pub fn local(n: usize, qubits: Vec<usize>, kraus: Vec<Mat>) -> Result<Channel> {
        let first = kraus.first().ok_or_else(|| invalid("empty Kraus set"))?;
        if first.nrows() != 1 << qubits.len() {
            return Err(Error::DimensionMismatch { expected: 1 << qubits.len(), got: first.nrows() });
        }
        if qubits.iter().any(|&q| q >= n) {
            return Err(invalid("qubit index out of range"));
        }
        let dev = kraus_deviation(&kraus);
        if dev > 1e-10 {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Channel { n, kind: Kind::Local { qubits, kraus } })
    }

    /// Sequential composition, first element applied first.
    pub fn compose(parts: Vec<Channel>) -> Result<Channel> {
        let n = parts.first().ok_or_else(|| invalid("empty composition"))?.n;
        if parts.iter().any(|c| c.n != n) {
            return Err(invalid("composed channels act on different qubit counts"));
        }
        Ok(Channel { n, kind: Kind::Composite(parts) })
    }

    /// `ρ ↦ (1−p) ρ + p P ρ P` for a single-qubit Pauli on qubit `q`.
    pub fn single_pauli_flip(n: usize, q: usize, letter: Pauli, p: f64) -> Result<Channel> {
        Channel::pauli(vec![(PauliString::identity(n), 1.0 - p), (PauliString::single(n, q, letter), p)])
    }

    pub fn bit_flip(n: usize, q: usize, p: f64) -> Result<Channel> {
        Self::single_pauli_flip(n, q, Pauli::X, p)
    }

    pub fn phase_flip(n: usize, q: usize, p: f64) -> Result<Channel> {
        Self::single_pauli_flip(n, q, Pauli::Z, p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Applies the channel to a density matrix.
    pub fn apply(&self, rho: &Mat) -> Result<Mat> {
        if rho.nrows() != self.dim() || !rho.is_square() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: rho.nrows() });
        }
        self.apply_linear(rho)
    }

    /// Applies the linear extension to an arbitrary operator.
    pub fn apply_linear(&self, m: &Mat) -> Result<Mat> {
        Ok(match &self.kind {
            Kind::Identity => m.clone(),
            Kind::Unitary(u) => u * m * u.adjoint(),
            Kind::Kraus(ops) => ops.iter().fold(Mat::zeros(m.nrows(), m.ncols()), |acc, k| acc + k * m * k.adjoint()),
            Kind::Pauli(terms) => terms
                .iter()
                .fold(Mat::zeros(m.nrows(), m.ncols()), |acc, (p, w)| acc + p.conjugate_matrix(m) * r(*w)),
            Kind::Depolarizing(p) => {
                let d = self.dim();
                m * r(1.0 - p) + identity(d) * (m.trace() * r(p / d as f64))
            }
            Kind::Local { qubits, kraus } => {
                let mut acc = Mat::zeros(m.nrows(), m.ncols());
                for k in kraus {
                    acc += apply_local(m, k, qubits, self.n)?;
                }
                acc
            }
            Kind::Composite(parts) => {
                let mut cur = m.clone();
                for p in parts {
                    cur = p.apply_linear(&cur)?;
                }
                cur
            }
        })
    }

    /// Maximum deviation of `Σ K†K` from identity, checked against `tol`.
    pub fn check_trace_preserving(&self, tol: f64) -> Result<()> {
        let dev = match &self.kind {
            Kind::Kraus(ops) | Kind::Local { kraus: ops, .. } => kraus_deviation(ops),
            Kind::Pauli(terms) => (terms.iter().map(|t| t.1).sum::<f64>() - 1.0).abs(),
            Kind::Composite(parts) => {
                for p in parts {
                    p.check_trace_preserving(tol)?;
                }
                0.0
            }
            Kind::Identity | Kind::Unitary(_) | Kind::Depolarizing(_) => 0.0,
        };
        if dev > tol {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(())
    }

    /// Dense Kraus operators of the whole channel.
    pub fn to_kraus(&self) -> Result<Vec<Mat>> {
        let d = self.dim();
        Ok(match &self.kind {
            Kind::Identity => vec![identity(d)],
            Kind::Unitary(u) => vec![u.clone()],
            Kind::Kraus(ops) => ops.clone(),
            Kind::Pauli(terms) => terms.iter().map(|(p, w)| p.dense() * r(w.sqrt())).collect(),
            Kind::Depolarizing(p) => {
                let dd = (d * d) as f64;
                PauliString::all(self.n)
                    .into_iter()
                    .map(|q| {
                        let w = if q.is_identity() { 1.0 - p + p / dd } else { p / dd };
                        q.dense() * r(w.sqrt())
                    })
                    .collect()
            }
            Kind::Local { qubits, kraus } => {
                kraus.iter().map(|k| qop::embed(k, qubits, self.n)).collect::<Result<_>>()?
            }
            Kind::Composite(parts) => {
                let mut acc = vec![identity(d)];
                for p in parts {
                    let ks = p.to_kraus()?;
                    acc = ks.iter().flat_map(|k| acc.iter().map(move |a| k * a)).collect();
                }
                acc
            }
        })
    }

    /// Probability of the identity term, when the channel is Pauli-diagonal.
    pub fn no_error_probability(&self) -> Option<f64> {
        match &self.kind {
            Kind::Identity => Some(1.0),
            Kind::Pauli(terms) => Some(terms.iter().filter(|t| t.0.is_identity()).map(|t| t.1).sum()),
            Kind::Depolarizing(p) => Some(1.0 - p + p / (self.dim() * self.dim()) as f64),
            _ => None,
        }
    }

    /// Pauli probabilities for Pauli-diagonal channels.
    pub fn pauli_terms(&self) -> Option<Vec<(PauliString, f64)>> {
        match &self.kind {
            Kind::Identity => Some(vec![(PauliString::identity(self.n), 1.0)]),
            Kind::Pauli(terms) => Some(terms.clone()),
            Kind::Depolarizing(p) => {
                let dd = (self.dim() * self.dim()) as f64;
                Some(
                    PauliString::all(self.n)
                        .into_iter()
                        .map(|q| {
                            let w = if q.is_identity() { 1.0 - p + p / dd } else { p / dd };
                            (q, w)
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// Eigenvalue `λ_Q` with `Λ(Q) = λ_Q Q`, for Pauli-diagonal channels.
    pub fn pauli_eigenvalue(&self, q: &PauliString) -> Option<f64> {
        match &self.kind {
            Kind::Identity => Some(1.0),
            Kind::Depolarizing(p) => Some(if q.is_identity() { 1.0 } else { 1.0 - p }),
            Kind::Pauli(terms) => {
                Some(terms.iter().map(|(p, w)| if p.commutes_with(q) { *w } else { -*w }).sum())
            }
            _ => None,
        }
    }

    /// `Tr(Q Λ(Q)) / d` for any channel; equals `λ_Q` on Pauli channels.
    pub fn pauli_fidelity(&self, q: &PauliString) -> Result<f64> {
        if let Some(l) = self.pauli_eigenvalue(q) {
            return Ok(l);
        }
        let qd = q.unsigned().dense();
        let out = self.apply_linear(&qd)?;
        Ok(qop::trace_product(&qd, &out).re / self.dim() as f64)
    }
}

/// Single-qubit Kraus operators for amplitude damping `γ` followed by
/// dephasing with coherence factor `λ`.
fn relaxation_kraus(gamma: f64, lambda: f64) -> Vec<Mat> {
    let ad = [
        Mat::from_row_slice(2, 2, &[ONE, r(0.0), r(0.0), r((1.0 - gamma).sqrt())]),
        Mat::from_row_slice(2, 2, &[r(0.0), r(gamma.sqrt()), r(0.0), r(0.0)]),
    ];
    let pd = [
        identity(2) * r(((1.0 + lambda) / 2.0).sqrt()),
        Pauli::Z.matrix() * r(((1.0 - lambda) / 2.0).max(0.0).sqrt()),
    ];
    pd.iter().flat_map(|p| ad.iter().map(move |a| p * a)).collect()
}

/// Per-spin amplitude damping toward |0⟩ plus pure dephasing, with total
/// transverse decay `exp(−t/T2*)`.
pub fn t1t2_channel(sys: &SpinSystem, t: f64) -> Result<Channel> {
    if !(t >= 0.0) {
        return Err(invalid("relaxation time must be nonnegative"));
    }
    let n = sys.n();
    let mut parts = Vec::with_capacity(n);
    for q in 0..n {
        let (t1, t2) = (sys.t1()[q], sys.t2star()[q]);
        if t2 > t1 {
            return Err(Error::Unphysical(format!("spin {q}: T2* = {t2} s exceeds T1 = {t1} s")));
        }
        let gamma = 1.0 - (-t / t1).exp();
        let lambda = (-t / t2 + t / (2.0 * t1)).exp();
        parts.push(Channel::local(n, vec![q], relaxation_kraus(gamma, lambda))?);
    }
    if parts.is_empty() {
        return Ok(Channel::identity(0));
    }
    Channel::compose(parts)
}

/// Rotates `targets` into the transverse plane and removes every coherence
/// that is off-diagonal in their z basis.
pub fn depolarize_via_gradient(rho: &Mat, targets: &[usize]) -> Result<Mat> {
    let n = qop::num_qubits(rho.nrows())?;
    if targets.is_empty() {
        return Err(invalid("gradient dephasing needs at least one target"));
    }
    let ry = qop::expm_hermitian(&(Pauli::Y.matrix() * r(0.5)), std::f64::consts::FRAC_PI_2);
    let mut out = rho.clone();
    let mut mask = 0usize;
    for &q in targets {
        out = apply_local(&out, &ry, &[q], n)?;
        mask |= 1 << qop::bit_of(q, n);
    }
    for i in 0..out.nrows() {
        for j in 0..out.ncols() {
            if (i ^ j) & mask != 0 {
                out[(i, j)] = qop::ZERO;
            }
        }
    }
    Ok(out)
}

/// Alternates each unitary step with one application of `noise`.
pub fn interleave(unitary_steps: &[Mat], noise: &Channel) -> Result<Channel> {
    let mut parts = Vec::with_capacity(2 * unitary_steps.len());
    for u in unitary_steps {
        let ch = Channel::unitary(u.clone())?;
        if ch.n() != noise.n() {
            return Err(Error::DimensionMismatch { expected: noise.dim(), got: u.nrows() });
        }
        parts.push(ch);
        parts.push(noise.clone());
    }
    if parts.is_empty() {
        return Ok(Channel::identity(noise.n()));
    }
    Channel::compose(parts)
}
