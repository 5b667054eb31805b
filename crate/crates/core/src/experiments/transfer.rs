// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Iterative state transfer along a dipolar chain by gates on its last two spins.
//!
//! Spin `k` (1-based) is qubit `k − 1`. `|0⟩` is all spins up and `|k⟩` has
//! only spin `k` flipped.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qop::pauli::{Pauli, PauliString};
use crate::qop::{self, Ket, Mat, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferChain {
    pub n: usize,
    /// `(j, k, D_jk)` with `1 ≤ j < k ≤ N − 1`, `D` in Hz.
    pub couplings: Vec<(usize, usize, f64)>,
    /// Evolution time per iteration in seconds.
    pub tau: f64,
}

impl TransferChain {
    /// Four-spin chain used by the reference runs.
    pub fn fixture() -> Self {
        TransferChain { n: 4, couplings: vec![(1, 2, -1200.0), (1, 3, -150.0), (2, 3, -500.0)], tau: 0.45e-3 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=7).contains(&self.n) {
            return Err(invalid("chain length must be in 2..=7"));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(invalid("tau must be positive"));
        }
        for &(j, k, d) in &self.couplings {
            if !(1 <= j && j < k && k < self.n) {
                return Err(invalid(format!("coupling ({j}, {k}) must satisfy 1 <= j < k <= N-1")));
            }
            if !d.is_finite() {
                return Err(invalid("couplings must be finite"));
            }
        }
        Ok(())
    }

    /// `(π/2) Σ D_jk (2 Z_j Z_k − X_j X_k − Y_j Y_k)` on spins `1..N−1`, in rad/s.
    pub fn hamiltonian(&self) -> Result<Mat> {
        self.validate()?;
        let m = self.n - 1;
        let mut h = Mat::zeros(1 << m, 1 << m);
        for &(j, k, d) in &self.couplings {
            for (p, w) in [(Pauli::Z, 2.0), (Pauli::X, -1.0), (Pauli::Y, -1.0)] {
                let mut word = vec![Pauli::I; m];
                word[j - 1] = p;
                word[k - 1] = p;
                h += PauliString::new(word).dense() * qop::r(std::f64::consts::FRAC_PI_2 * d * w);
            }
        }
        Ok(h)
    }

    /// Phase acquired by `|0⟩` per iteration: `U_τ|0⟩ = e^{iθ}|0⟩`.
    pub fn theta(&self) -> f64 {
        -self.tau * std::f64::consts::PI * self.couplings.iter().map(|c| c.2).sum::<f64>()
    }

    /// `U_τ ⊗ I` on all `N` spins.
    pub fn step_unitary(&self) -> Result<Mat> {
        let u = qop::expm_hermitian(&self.hamiltonian()?, self.tau);
        Ok(qop::tensor(&u, &qop::identity(2)))
    }

    fn index(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            1 << (self.n - k)
        }
    }

    /// `U_τ ⊗ I` restricted to `{|0⟩, |1⟩, …, |N⟩}`.
    fn reduced_step(&self) -> Result<Mat> {
        let full = self.step_unitary()?;
        let idx: Vec<usize> = (0..=self.n).map(|k| self.index(k)).collect();
        Ok(Mat::from_fn(self.n + 1, self.n + 1, |a, b| full[(idx[a], idx[b])]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferResult {
    pub theta: f64,
    /// Fidelity to `α e^{inθ}|0⟩ + β|N⟩`; entry 0 is the input.
    pub fidelity: Vec<f64>,
    /// `|c_N|²` after each iteration.
    pub sink_population: Vec<f64>,
    /// Largest deviation of `⟨Σ (1 − Z)/2⟩` from its initial value.
    pub excitation_drift: f64,
    #[serde(skip)]
    pub final_state: Ket,
}

/// 2×2 block on `(|1⟩_{N−1}|0⟩_N, |0⟩_{N−1}|1⟩_N)` sending `(a, b)` to `(0, r)`.
fn greedy_block(a: C64, b: C64) -> Option<[[C64; 2]; 2]> {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (r > 1e-300).then(|| [[b / r, -a / r], [a.conj() / r, b.conj() / r]])
}

/// Applies a block on `(|N−1⟩, |N⟩)` to a dense ket.
fn apply_end_block(psi: &mut Ket, m: &[[C64; 2]; 2], n: usize) {
    // local pair index 2 = |10⟩, 1 = |01⟩
    for high in 0..1usize << (n - 2) {
        let i10 = high << 2 | 2;
        let i01 = high << 2 | 1;
        let (x, y) = (psi[i10], psi[i01]);
        psi[i10] = m[0][0] * x + m[0][1] * y;
        psi[i01] = m[1][0] * x + m[1][1] * y;
    }
}

fn excitations(psi: &Ket) -> f64 {
    psi.iter().enumerate().map(|(k, a)| a.norm_sqr() * k.count_ones() as f64).sum()
}

/// Transfers `α|0⟩ + β|j⟩` to `α e^{inθ}|0⟩ + β|N⟩`. Each iteration applies
/// `U_τ` on spins `1..N−1` and then the end gate that moves the whole
/// `|N−1⟩` amplitude of the evolved `|j⟩` into the sink.
pub fn state_transfer(chain: &TransferChain, source: usize, alpha: C64, beta: C64, iterations: usize) -> Result<TransferResult> {
    chain.validate()?;
    let n = chain.n;
    if !(1..=n).contains(&source) {
        return Err(invalid(format!("source spin must be in 1..={n}")));
    }
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    if !(norm > 0.0) {
        return Err(invalid("input amplitudes must not both vanish"));
    }
    let (alpha, beta) = (alpha / norm, beta / norm);
    let d = 1usize << n;
    let u = chain.step_unitary()?;
    let theta = chain.theta();
    let (src, sink, prev) = (chain.index(source), chain.index(n), chain.index(n - 1));
    let mut psi = Ket::zeros(d);
    psi[0] = alpha;
    psi[src] += beta;
    // the gates are computed from the evolution of |j⟩ alone, so they do not depend on α, β
    let mut reference = qop::basis(d, src);
    let fid = |psi: &Ket, k: usize| -> f64 {
        let a0 = alpha * C64::from_polar(1.0, k as f64 * theta);
        (a0.conj() * psi[0] + beta.conj() * psi[sink]).norm_sqr()
    };
    let n0 = excitations(&psi);
    let mut fidelity = vec![fid(&psi, 0)];
    let mut sink_population = vec![psi[sink].norm_sqr()];
    let mut drift: f64 = 0.0;
    let mut idle = 0;
    for it in 1..=iterations {
        psi = &u * psi;
        reference = &u * reference;
        let (a, b) = (reference[prev], reference[sink]);
        if a.norm_sqr() < 1e-14 && b.norm_sqr() < 1.0 - 1e-10 {
            idle += 1;
            if idle >= n {
                return Err(Error::Stalled(format!("no amplitude reached spin {} for {n} iterations", n - 1)));
            }
        } else {
            idle = 0;
        }
        if let Some(m) = greedy_block(a, b) {
            apply_end_block(&mut psi, &m, n);
            apply_end_block(&mut reference, &m, n);
        }
        fidelity.push(fid(&psi, it));
        sink_population.push(psi[sink].norm_sqr());
        drift = drift.max((excitations(&psi) - n0).abs());
    }
    Ok(TransferResult { theta, fidelity, sink_population, excitation_drift: drift, final_state: psi })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntangleResult {
    pub iterations: usize,
    /// Fidelity to `(|j⟩ + |N⟩)/√2` after the greedy start and after each sweep.
    pub sweep_fidelity: Vec<f64>,
    pub fidelity: f64,
    #[serde(skip)]
    pub final_state: Ket,
}

type Block = [[C64; 2]; 2];

const IDENTITY_BLOCK: Block = [[qop::ONE, qop::ZERO], [qop::ZERO, qop::ONE]];

/// Unitary block sending unit `from` to unit `to`.
fn rotate_onto(from: [C64; 2], to: [C64; 2]) -> Block {
    let fp = [-from[1].conj(), from[0].conj()];
    let tp = [-to[1].conj(), to[0].conj()];
    let mut m = [[qop::ZERO; 2]; 2];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = to[r] * from[c].conj() + tp[r] * fp[c].conj();
        }
    }
    m
}

fn unit(v: [C64; 2]) -> Option<([C64; 2], f64)> {
    let r = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    (r > 1e-300).then(|| ([v[0] / r, v[1] / r], r))
}

/// Block on the last two entries of a reduced vector `(c_0, c_1, …, c_N)`.
fn apply_block(v: &mut Ket, m: &Block) {
    let n = v.len() - 1;
    let (x, y) = (v[n - 1], v[n]);
    v[n - 1] = m[0][0] * x + m[0][1] * y;
    v[n] = m[1][0] * x + m[1][1] * y;
}

fn apply_block_adjoint(v: &mut Ket, m: &Block) {
    let adj = [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]];
    apply_block(v, &adj);
}

/// Builds `(|j⟩ + |N⟩)/√2` from `|j⟩` with `iterations` rounds of `U_τ` and
/// an end gate. Gates start from greedy transfer capped at half the
/// population and are then refined by forward/backward sweeps, each gate
/// update maximizing the overlap with everything else held fixed.
pub fn entangle_ends(chain: &TransferChain, source: usize, iterations: usize) -> Result<EntangleResult> {
    chain.validate()?;
    let n = chain.n;
    if !(1..n).contains(&source) {
        return Err(invalid(format!("source spin must be in 1..={}", n - 1)));
    }
    let u = chain.reduced_step()?;
    let ud = u.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut target = Ket::zeros(n + 1);
    target[source] = qop::r(s);
    target[n] = qop::r(s);
    let start = qop::basis(n + 1, source);
    let overlap = |psi: &Ket| target.dotc(psi);

    // greedy start
    let mut gates = vec![IDENTITY_BLOCK; iterations];
    let mut psi = start.clone();
    for g in gates.iter_mut() {
        psi = &u * psi;
        if let Some((from, r)) = unit([psi[n - 1], psi[n]]) {
            let keep = (r * r).min(0.5).sqrt();
            let to = [qop::r((r * r - keep * keep).max(0.0).sqrt() / r), qop::r(keep / r)];
            *g = rotate_onto(from, to);
            apply_block(&mut psi, g);
        }
    }
    let forward = |gates: &[Block]| -> Vec<Ket> {
        // phi[k] = state entering gate k
        let mut out = Vec::with_capacity(gates.len());
        let mut p = start.clone();
        for g in gates {
            p = &u * p;
            out.push(p.clone());
            apply_block(&mut p, g);
        }
        out
    };
    let backward = |gates: &[Block]| -> Vec<Ket> {
        // chi[k] = target pulled back through gates k+1..
        let mut out = vec![Ket::zeros(n + 1); gates.len()];
        let mut c = target.clone();
        for k in (0..gates.len()).rev() {
            out[k] = c.clone();
            apply_block_adjoint(&mut c, &gates[k]);
            c = &ud * c;
        }
        out
    };
    let best_block = |phi: &Ket, chi: &Ket| -> Option<Block> {
        let mut rest = chi.dotc(phi);
        rest -= chi[n - 1].conj() * phi[n - 1] + chi[n].conj() * phi[n];
        let (pf, _) = unit([phi[n - 1], phi[n]])?;
        let (cf, _) = unit([chi[n - 1], chi[n]])?;
        let ph = if rest.norm() > 0.0 { rest / rest.norm() } else { qop::ONE };
        Some(rotate_onto(pf, [cf[0] * ph, cf[1] * ph]))
    };
    let final_state = |gates: &[Block]| -> Ket {
        let mut p = start.clone();
        for g in gates {
            p = &u * p;
            apply_block(&mut p, g);
        }
        p
    };

    let mut sweep_fidelity = vec![overlap(&final_state(&gates)).norm_sqr()];
    if iterations > 0 {
        for sweep in 0..200 {
            if sweep % 2 == 0 {
                let chi = backward(&gates);
                let mut p = start.clone();
                for k in 0..iterations {
                    p = &u * p;
                    if let Some(m) = best_block(&p, &chi[k]) {
                        gates[k] = m;
                    }
                    apply_block(&mut p, &gates[k]);
                }
            } else {
                let phi = forward(&gates);
                let mut c = target.clone();
                for k in (0..iterations).rev() {
                    if let Some(m) = best_block(&phi[k], &c) {
                        gates[k] = m;
                    }
                    apply_block_adjoint(&mut c, &gates[k]);
                    c = &ud * c;
                }
            }
            let f = overlap(&final_state(&gates)).norm_sqr();
            let last = *sweep_fidelity.last().expect("nonempty");
            sweep_fidelity.push(f);
            if f - last < 1e-12 {
                break;
            }
        }
    }
    let reduced = final_state(&gates);
    let mut dense = Ket::zeros(1 << n);
    for k in 0..=n {
        dense[chain.index(k)] = reduced[k];
    }
    let fidelity = *sweep_fidelity.last().expect("nonempty");
    Ok(EntangleResult { iterations, sweep_fidelity, fidelity, final_state: dense })
}
