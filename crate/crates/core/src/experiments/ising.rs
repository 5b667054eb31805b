// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Ground-state thermodynamics of the three-spin Ising ring in a field.

use serde::Serialize;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingPoint {
    pub h: f64,
    pub magnetization: f64,
    pub entropy_bits: f64,
    pub degeneracy: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingResult {
    pub j: f64,
    pub points: Vec<IsingPoint>,
}

/// Relative tolerance for grouping degenerate levels.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// `z_q ∈ {+1, −1}` for basis state `k` (qubit 0 most significant, `|0⟩ = +1`).
fn spins(k: usize) -> [f64; 3] {
    [0, 1, 2].map(|q| if k >> (2 - q) & 1 == 0 { 1.0 } else { -1.0 })
}

/// `H = J(Z1Z2 + Z2Z3 + Z1Z3) + h(Z1 + Z2 + Z3)` is diagonal; the ground
/// state is the uniform mixture over the lowest level.
pub fn ising_point(j: f64, h: f64) -> IsingPoint {
    let energies: Vec<f64> = (0..8)
        .map(|k| {
            let z = spins(k);
            j * (z[0] * z[1] + z[1] * z[2] + z[0] * z[2]) + h * (z[0] + z[1] + z[2])
        })
        .collect();
    let emin = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = DEGENERACY_TOL * emin.abs().max(1.0);
    let ground: Vec<usize> = (0..8).filter(|&k| energies[k] - emin <= tol).collect();
    let g = ground.len();
    let magnetization = ground.iter().map(|&k| spins(k).iter().sum::<f64>()).sum::<f64>() / g as f64;
    IsingPoint { h, magnetization, entropy_bits: (g as f64).log2(), degeneracy: g }
}

pub fn ising_ground(j: f64, h_grid: &[f64]) -> Result<IsingResult> {
    if !(j > 0.0) {
        return Err(invalid("coupling J must be positive"));
    }
    if h_grid.iter().any(|h| !h.is_finite()) {
        return Err(invalid("field grid must be finite"));
    }
    Ok(IsingResult { j, points: h_grid.iter().map(|&h| ising_point(j, h)).collect() })
}

/// Fields where the magnetization jumps inside `[lo, hi]`, located by
/// bisection to `tol` after a scan with `n_scan` intervals.
pub fn magnetization_steps(j: f64, lo: f64, hi: f64, n_scan: usize, tol: f64) -> Vec<f64> {
    // level crossings are where the uniform ground mixture changes; bisect on
    // points away from the crossing itself
    let m = |h: f64| ising_point(j, h).magnetization;
    let xs: Vec<f64> = (0..=n_scan).map(|k| lo + (hi - lo) * k as f64 / n_scan as f64).collect();
    let mut steps = Vec::new();
    for w in xs.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (ma, mb) = (m(a), m(b));
        if (ma - mb).abs() < 1e-12 {
            continue;
        }
        while b - a > tol {
            let c = 0.5 * (a + b);
            if (m(c) - ma).abs() < 1e-12 {
                a = c;
            } else {
                b = c;
            }
        }
        let s = 0.5 * (a + b);
        if steps.last().is_none_or(|&p: &f64| (s - p).abs() > 10.0 * tol) {
            steps.push(s);
        }
    }
    steps
}
