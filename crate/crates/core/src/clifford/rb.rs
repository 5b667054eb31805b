// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Randomized benchmarking with a Clifford recovery gate.

use rand::Rng;
use serde::Serialize;

use super::gates::CliffordGate;
use super::tableau::CliffordTableau;
use crate::error::{invalid, Error, Result};
use crate::noise::Channel;
use crate::qop::pauli::{Pauli, PauliString};
use crate::qop::{self, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RbFit {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    /// Error per gate `(1 − p)(1 − 1/d)`.
    pub r: f64,
    pub sse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RbResult {
    pub lengths: Vec<usize>,
    /// Mean survival `⟨Z_0⟩` after each length.
    pub survival: Vec<f64>,
    pub fit: RbFit,
}

/// Gate draw: `H` or `S H S†` on a random qubit with probability 2/3,
/// otherwise a nearest-neighbour CNOT with random orientation.
pub fn sample_rb_gate<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordGate {
    if n == 1 || rng.random_bool(2.0 / 3.0) {
        let q = rng.random_range(0..n);
        if rng.random_bool(0.5) {
            CliffordGate::H(q)
        } else {
            CliffordGate::PhaseHadamard(q)
        }
    } else {
        let a = rng.random_range(0..n - 1);
        if rng.random_bool(0.5) {
            CliffordGate::Cnot(a, a + 1)
        } else {
            CliffordGate::Cnot(a + 1, a)
        }
    }
}

/// Depolarizing strength giving average gate infidelity `r` on `n` qubits.
pub fn depolarizing_for_infidelity(n: usize, r: f64) -> f64 {
    let d = (1usize << n) as f64;
    r / (1.0 - 1.0 / d)
}

/// Survival of one random sequence of `m` gates plus recovery, each followed by `noise`.
fn run_sequence<R: Rng + ?Sized>(n: usize, m: usize, noise: &Channel, rng: &mut R) -> Result<f64> {
    let z0 = PauliString::single(n, 0, Pauli::Z);
    let d = 1usize << n;
    let mut rho = (qop::identity(d) + z0.dense()) / qop::r(d as f64);
    let mut total = CliffordTableau::identity(n);
    let apply = |rho: &Mat, u: &Mat| noise.apply(&qop::conjugate(rho, u));
    for _ in 0..m {
        let g = sample_rb_gate(n, rng);
        total = total.then(&g.tableau(n)?);
        let local = g.local_matrix();
        rho = noise.apply(&qop::apply_local(&rho, &local, &g.qubits(), n)?)?;
    }
    let recovery = total.inverse().to_dense();
    rho = apply(&rho, &recovery)?;
    Ok(qop::pauli_expectation(&rho, &z0))
}

pub fn randomized_benchmarking<R: Rng + ?Sized>(
    n: usize,
    noise: &Channel,
    lengths: &[usize],
    sequences_per_length: usize,
    rng: &mut R,
) -> Result<RbResult> {
    if noise.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: noise.n() });
    }
    if lengths.len() < 3 || sequences_per_length == 0 {
        return Err(invalid("need at least three lengths and one sequence per length"));
    }
    noise.check_trace_preserving(1e-10)?;
    let mut survival = Vec::with_capacity(lengths.len());
    for &m in lengths {
        let mut acc = 0.0;
        for _ in 0..sequences_per_length {
            acc += run_sequence(n, m, noise, rng)?;
        }
        survival.push(acc / sequences_per_length as f64);
    }
    let fit = fit_decay(lengths, &survival, n)?;
    Ok(RbResult { lengths: lengths.to_vec(), survival, fit })
}

/// Least squares for `(A, B) ∈ [0,1]²` at fixed `p`.
fn linear_part(x: &[f64], y: &[f64], p: f64) -> (f64, f64, f64) {
    let basis: Vec<f64> = x.iter().map(|&m| p.powf(m)).collect();
    let sse = |a: f64, b: f64| basis.iter().zip(y).map(|(f, v)| (a * f + b - v).powi(2)).sum::<f64>();
    let k = x.len() as f64;
    let (sf, sy) = (basis.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sff = basis.iter().map(|f| f * f).sum::<f64>();
    let sfy = basis.iter().zip(y).map(|(f, v)| f * v).sum::<f64>();
    let det = k * sff - sf * sf;
    let mut cands: Vec<(f64, f64)> = Vec::new();
    if det.abs() > 1e-14 {
        cands.push(((k * sfy - sf * sy) / det, (sff * sy - sf * sfy) / det));
    }
    // boundary solutions
    for a in [0.0, 1.0] {
        cands.push((a, (sy - a * sf) / k));
    }
    if sff > 0.0 {
        for b in [0.0, 1.0] {
            cands.push(((sfy - b * sf) / sff, b));
        }
    }
    cands
        .into_iter()
        .map(|(a, b)| (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0)))
        .map(|(a, b)| (a, b, sse(a, b)))
        .min_by(|u, v| u.2.total_cmp(&v.2))
        .expect("candidates are nonempty")
}

/// Fits `A p^m + B` by scanning `p` and refining with golden-section search.
pub fn fit_decay(lengths: &[usize], survival: &[f64], n: usize) -> Result<RbFit> {
    if lengths.len() != survival.len() || lengths.len() < 3 {
        return Err(Error::FitFailed("need at least three (length, survival) points".into()));
    }
    if survival.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitFailed("survival contains non-finite values".into()));
    }
    let x: Vec<f64> = lengths.iter().map(|&m| m as f64).collect();
    let (first, last) = (survival[0], survival[survival.len() - 1]);
    if last > first + 1e-3 {
        return Err(Error::FitFailed(format!("survival does not decay ({first} -> {last})")));
    }
    let cost = |p: f64| linear_part(&x, survival, p).2;
    let grid = 2000;
    // scanned from p = 1 down so flat data resolves to no decay
    let best = (0..=grid).rev().map(|k| k as f64 / grid as f64).min_by(|a, b| cost(*a).total_cmp(&cost(*b))).unwrap();
    let (mut lo, mut hi) = ((best - 1.0 / grid as f64).max(0.0), (best + 1.0 / grid as f64).min(1.0));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if cost(m1) <= cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let refined = 0.5 * (lo + hi);
    let p = if cost(refined) < cost(best) { refined } else { best };
    let (a, b, sse) = linear_part(&x, survival, p);
    let d = (1usize << n) as f64;
    Ok(RbFit { a, b, p, r: (1.0 - p) * (1.0 - 1.0 / d), sse })
}
