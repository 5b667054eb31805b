// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Geometric entanglement of periodic XXZ ground states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::qop::pauli::{Pauli, PauliString};
use crate::qop::{self, Ket, Mat, C64};

pub const DEFAULT_RESTARTS: usize = 16;

/// `Σ_i X_i X_{i+1} + Y_i Y_{i+1} + γ Z_i Z_{i+1}` with `N + 1 ≡ 1`.
pub fn xxz_hamiltonian(n: usize, gamma: f64) -> Result<Mat> {
    if !(2..=7).contains(&n) {
        return Err(invalid("XXZ chain length must be in 2..=7"));
    }
    let d = 1usize << n;
    let mut h = Mat::zeros(d, d);
    // a 2-site ring has a single bond
    let bonds: Vec<(usize, usize)> = if n == 2 { vec![(0, 1)] } else { (0..n).map(|i| (i, (i + 1) % n)).collect() };
    for (a, b) in bonds {
        for (p, w) in [(Pauli::X, 1.0), (Pauli::Y, 1.0), (Pauli::Z, gamma)] {
            let mut word = vec![Pauli::I; n];
            word[a] = p;
            word[b] = p;
            h += PauliString::new(word).dense() * qop::r(w);
        }
    }
    Ok(h)
}

fn magnetization_of(k: usize, n: usize) -> i32 {
    n as i32 - 2 * k.count_ones() as i32
}

/// Ground state: inside the degenerate ground space, restrict to the
/// sectors of smallest `|Σ Z|` and project the first computational basis
/// state (in index order) with nonzero weight.
pub fn select_ground_state(h: &Mat, n: usize) -> (f64, Ket) {
    let (vals, vecs) = qop::herm_eig(h);
    let e0 = vals[0];
    let tol = 1e-9 * e0.abs().max(1.0);
    let g = vals.iter().take_while(|&&v| v - e0 <= tol).count();
    let ground = vecs.columns(0, g).into_owned();
    let d = h.nrows();
    // weight of the ground space in each magnetization sector
    let proj = &ground * ground.adjoint();
    let min_abs_m = (0..d)
        .filter(|&k| proj[(k, k)].re > 1e-9)
        .map(|k| magnetization_of(k, n).abs())
        .min()
        .expect("ground space is nonempty");
    // H conserves magnetization, so the ground projector maps a sector basis state into that sector
    for k in (0..d).filter(|&k| magnetization_of(k, n).abs() == min_abs_m) {
        let v = proj.column(k).into_owned();
        let nv = v.norm();
        if nv > 1e-6 {
            return (e0, v / qop::r(nv));
        }
    }
    unreachable!("a nonempty subspace has a basis state with nonzero projection")
}

/// Contracts `psi` with `conj(a_j)` on every qubit but `i`.
fn environment(psi: &Ket, locals: &[[C64; 2]], i: usize) -> [C64; 2] {
    let n = locals.len();
    let mut out = [C64::new(0.0, 0.0); 2];
    for (k, amp) in psi.iter().enumerate() {
        let mut w = *amp;
        for (j, a) in locals.iter().enumerate() {
            if j != i {
                w *= a[k >> (n - 1 - j) & 1].conj();
            }
        }
        out[k >> (n - 1 - i) & 1] += w;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTrace {
    /// `Λ²` after every single-site update.
    pub lambda2: Vec<f64>,
}

/// Alternating single-site maximization of `|⟨a_1 … a_N|ψ⟩|²`.
pub fn max_product_overlap<R: Rng + ?Sized>(psi: &Ket, n: usize, rng: &mut R, max_sweeps: usize) -> (f64, SweepTrace) {
    let mut locals: Vec<[C64; 2]> = (0..n)
        .map(|_| {
            let v = qop::random_ket(2, rng);
            [v[0], v[1]]
        })
        .collect();
    let mut trace = Vec::new();
    let mut last = -1.0;
    let order: Vec<usize> = (0..n).chain((0..n.saturating_sub(1)).rev().skip(1)).collect();
    for _ in 0..max_sweeps {
        let mut best = 0.0;
        for &i in &order {
            let env = environment(psi, &locals, i);
            let norm = (env[0].norm_sqr() + env[1].norm_sqr()).sqrt();
            if norm > 0.0 {
                locals[i] = [env[0] / norm, env[1] / norm];
            }
            best = norm * norm;
            trace.push(best);
        }
        if (best - last).abs() < 1e-15 {
            break;
        }
        last = best;
    }
    (last.max(*trace.last().unwrap_or(&0.0)), SweepTrace { lambda2: trace })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XxzResult {
    pub n: usize,
    pub gamma: f64,
    pub energy: f64,
    pub lambda2_max: f64,
    /// `−log2 Λ²_max`
    pub ge: f64,
    pub restart_lambda2: Vec<f64>,
    /// Squared overlaps with `|00…0⟩`, `|+−+−…⟩` and `|0101…⟩`.
    pub branches: [f64; 3],
    #[serde(skip)]
    pub ground_state: Ket,
}

fn product(n: usize, site: impl Fn(usize) -> [C64; 2]) -> Ket {
    let d = 1usize << n;
    Ket::from_fn(d, |k, _| (0..n).fold(C64::new(1.0, 0.0), |acc, q| acc * site(q)[k >> (n - 1 - q) & 1]))
}

pub fn branch_states(n: usize) -> [Ket; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| C64::new(x, 0.0);
    [
        product(n, |_| [r(1.0), r(0.0)]),
        product(n, |q| if q % 2 == 0 { [r(s), r(s)] } else { [r(s), r(-s)] }),
        product(n, |q| if q % 2 == 0 { [r(1.0), r(0.0)] } else { [r(0.0), r(1.0)] }),
    ]
}

pub fn xxz_ground_ge(n: usize, gamma: f64, restarts: usize, seed: u64) -> Result<XxzResult> {
    if restarts == 0 {
        return Err(invalid("need at least one restart"));
    }
    let h = xxz_hamiltonian(n, gamma)?;
    let (energy, psi) = select_ground_state(&h, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let restart_lambda2: Vec<f64> = (0..restarts).map(|_| max_product_overlap(&psi, n, &mut rng, 500).0).collect();
    let lambda2_max = restart_lambda2.iter().cloned().fold(0.0, f64::max).min(1.0);
    let branches = branch_states(n).map(|b| b.dotc(&psi).norm_sqr());
    Ok(XxzResult { n, gamma, energy, lambda2_max, ge: -lambda2_max.log2(), restart_lambda2, branches, ground_state: psi })
}

/// Linear-interpolated crossing of branches 2 and 3 on a γ scan.
pub fn branch_crossing(points: &[XxzResult]) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let d0 = w[0].branches[1] - w[0].branches[2];
        let d1 = w[1].branches[1] - w[1].branches[2];
        (d0 == 0.0 || d0.signum() != d1.signum()).then(|| {
            if d0 == d1 {
                w[0].gamma
            } else {
                w[0].gamma + (w[1].gamma - w[0].gamma) * d0 / (d0 - d1)
            }
        })
    })
}

/// Midpoint of the largest GE change between neighbouring scan points.
pub fn largest_ge_jump(points: &[XxzResult]) -> Option<(f64, f64)> {
    points
        .windows(2)
        .map(|w| (0.5 * (w[0].gamma + w[1].gamma), (w[1].ge - w[0].ge).abs()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ferromagnetic_limit_is_a_product_state() {
        let r = xxz_ground_ge(4, -10.0, 4, 1).unwrap();
        assert!((r.lambda2_max - 1.0).abs() < 1e-10 && r.ge.abs() < 1e-9);
        assert!((r.branches[0] - 1.0).abs() < 1e-12 && (r.branches[1] - 1.0 / 16.0).abs() < 1e-12);
        assert!(r.branches[2].abs() < 1e-12);
    }

    #[test]
    fn sweeps_are_monotone_and_restarts_agree() {
        let h = xxz_hamiltonian(4, 0.3).unwrap();
        let (_, psi) = select_ground_state(&h, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (best, tr) = max_product_overlap(&psi, 4, &mut rng, 500);
        assert!(tr.lambda2.windows(2).all(|w| w[1] >= w[0] - 1e-14));
        let r = xxz_ground_ge(4, 0.3, 16, 5).unwrap();
        assert!(r.restart_lambda2.iter().all(|v| (v - r.lambda2_max).abs() < 1e-8), "{:?}", r.restart_lambda2);
        assert!((best - r.lambda2_max).abs() < 1e-8);
    }

    #[test]
    fn ground_state_is_an_eigenvector() {
        for g in [-2.0, -1.0, 0.0, 1.0, 2.5] {
            let h = xxz_hamiltonian(4, g).unwrap();
            let (e, psi) = select_ground_state(&h, 4);
            assert!((&h * &psi - &psi * qop::r(e)).norm() < 1e-10);
        }
    }

    #[test]
    fn branch_crossing_and_jump() {
        let scan = |lo: f64, hi: f64| -> Vec<XxzResult> {
            let k = ((hi - lo) / 0.01).round() as usize;
            (0..=k).map(|i| xxz_ground_ge(4, lo + 0.01 * i as f64, 4, 3).unwrap()).collect()
        };
        let near_one = scan(0.5, 1.5);
        let x = branch_crossing(&near_one).unwrap();
        let near_minus_one = scan(-1.5, -0.5);
        let (g, jump) = largest_ge_jump(&near_minus_one).unwrap();
        assert!((x - 1.0).abs() < 0.01);
        assert!((g + 1.0).abs() < 0.01 && jump > 0.1);
    }
}
