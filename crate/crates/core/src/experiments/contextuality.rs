// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! State-independent contextuality test on two spins.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::noise::Channel;
use crate::qop::pauli::{Pauli, PauliString};
use crate::qop::{self, Mat};

/// The 3×3 observable grid; rows and columns are commuting triples.
pub const MERMIN_GRID: [[&str; 3]; 3] = [["IZ", "ZI", "ZZ"], ["XI", "IX", "XX"], ["XZ", "ZX", "YY"]];

/// Products of rows 1..3 then columns 1..3.
pub const EXPECTED_PRODUCTS: [f64; 6] = [1.0, 1.0, 1.0, 1.0, 1.0, -1.0];

/// Classical (noncontextual) bound on β.
pub const CLASSICAL_BOUND: f64 = 4.0;

/// Meter depolarizing strength calibrated so `6 (1 − p)³ = 5.2`.
pub fn calibrated_meter_noise() -> f64 {
    1.0 - (5.2f64 / 6.0).cbrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ContextMethod {
    Direct,
    Meter,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextualityResult {
    /// `r1 r2 r3 c1 c2 c3`
    pub correlations: [f64; 6],
    pub beta: f64,
}

fn triples() -> [[PauliString; 3]; 6] {
    let g = |r: usize, c: usize| -> PauliString { MERMIN_GRID[r][c].parse().expect("grid literal") };
    [
        [g(0, 0), g(0, 1), g(0, 2)],
        [g(1, 0), g(1, 1), g(1, 2)],
        [g(2, 0), g(2, 1), g(2, 2)],
        [g(0, 0), g(1, 0), g(2, 0)],
        [g(0, 1), g(1, 1), g(2, 1)],
        [g(0, 2), g(1, 2), g(2, 2)],
    ]
}

fn beta_of(c: &[f64; 6]) -> f64 {
    c[0] + c[1] + c[2] + c[3] + c[4] - c[5]
}

/// Coupling `P₊ ⊗ I + P₋ ⊗ Z_meter` with `P± = (I ± O)/2`; meter is qubit 2.
fn meter_coupling(o: &PauliString) -> Mat {
    let od = o.dense();
    let i2 = qop::identity(4);
    let z = Pauli::Z.matrix();
    let plus = (&i2 + &od) * qop::r(0.5);
    let minus = (&i2 - &od) * qop::r(0.5);
    qop::tensor(&plus, &qop::identity(2)) + qop::tensor(&minus, &z)
}

/// `β = r1 + r2 + r3 + c1 + c2 − c3`. `meter_noise` is a 3-qubit channel applied
/// after every coupling and requires the meter method.
pub fn contextuality_beta(rho: &Mat, meter_noise: Option<&Channel>, method: ContextMethod) -> Result<ContextualityResult> {
    if rho.nrows() != 4 || !rho.is_square() {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.nrows() });
    }
    qop::validate_density(rho, qop::Slack::default())?;
    let mut corr = [0.0; 6];
    match method {
        ContextMethod::Direct => {
            if meter_noise.is_some() {
                return Err(invalid("meter noise applies only to the meter method"));
            }
            for (k, t) in triples().iter().enumerate() {
                let prod = t[0].dense() * t[1].dense() * t[2].dense();
                corr[k] = qop::trace_product(rho, &prod).re;
            }
        }
        ContextMethod::Meter => {
            if let Some(ch) = meter_noise {
                if ch.n() != 3 {
                    return Err(Error::DimensionMismatch { expected: 3, got: ch.n() });
                }
            }
            let plus = Mat::from_element(2, 2, qop::r(0.5));
            let start = qop::tensor(rho, &plus);
            let mx = PauliString::single(3, 2, Pauli::X);
            for (k, t) in triples().iter().enumerate() {
                let mut s = start.clone();
                for o in t {
                    s = qop::conjugate(&s, &meter_coupling(o));
                    if let Some(ch) = meter_noise {
                        s = ch.apply(&s)?;
                    }
                }
                corr[k] = qop::pauli_expectation(&s, &mx);
            }
        }
    }
    Ok(ContextualityResult { correlations: corr, beta: beta_of(&corr) })
}

/// Largest β over all `2^9` deterministic ±1 assignments to the grid.
pub fn classical_beta_max() -> f64 {
    (0..1u32 << 9)
        .map(|mask| {
            let v = |r: usize, c: usize| if mask >> (3 * r + c) & 1 == 1 { -1.0 } else { 1.0 };
            let rows: Vec<f64> = (0..3).map(|r| v(r, 0) * v(r, 1) * v(r, 2)).collect();
            let cols: Vec<f64> = (0..3).map(|c| v(0, c) * v(1, c) * v(2, c)).collect();
            beta_of(&[rows[0], rows[1], rows[2], cols[0], cols[1], cols[2]])
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_structure() {
        for (t, want) in triples().iter().zip(EXPECTED_PRODUCTS) {
            assert!(t[0].commutes_with(&t[1]) && t[1].commutes_with(&t[2]) && t[0].commutes_with(&t[2]));
            let p = t[0].mul(&t[1]).mul(&t[2]);
            assert!(p.is_identity() && p.sign() == Some(want));
        }
    }

    #[test]
    fn quantum_and_classical_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = qop::random_density(4, &mut rng);
        let d = contextuality_beta(&rho, None, ContextMethod::Direct).unwrap();
        let m = contextuality_beta(&rho, None, ContextMethod::Meter).unwrap();
        assert!((d.beta - 6.0).abs() < 1e-12 && (m.beta - 6.0).abs() < 1e-12);
        assert_eq!(classical_beta_max(), CLASSICAL_BOUND);
    }

    #[test]
    fn calibrated_noise_gives_5_2() {
        let p = calibrated_meter_noise();
        let ch = Channel::depolarizing(3, p).unwrap();
        let r = contextuality_beta(&qop::maximally_mixed(2), Some(&ch), ContextMethod::Meter).unwrap();
        assert!((r.beta - 5.2).abs() < 1e-10);
    }
}
