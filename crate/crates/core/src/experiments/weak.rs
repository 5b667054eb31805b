// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Weak measurement with post-selection on an ensemble.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::qop::pauli::Pauli;
use crate::qop::{self, Ket, Mat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakValueEstimate {
    pub re: f64,
    pub im: f64,
    pub analytic_re: f64,
    pub analytic_im: f64,
    /// Fraction of the ensemble passing post-selection.
    pub success_probability: f64,
}

impl WeakValueEstimate {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }

    pub fn analytic(&self) -> C64 {
        C64::new(self.analytic_re, self.analytic_im)
    }
}

/// Smallest `|⟨φ|ψ⟩|` accepted.
pub const OVERLAP_FLOOR: f64 = 1e-6;

fn sigma(axis: [f64; 3]) -> Result<Mat> {
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(invalid("measurement axis must be nonzero"));
    }
    Ok([Pauli::X, Pauli::Y, Pauli::Z]
        .iter()
        .zip(axis)
        .fold(Mat::zeros(2, 2), |acc, (p, a)| acc + p.matrix() * qop::r(a / norm)))
}

/// `⟨φ|σ_n̂|ψ⟩ / ⟨φ|ψ⟩`
pub fn analytic_weak_value(psi: &Ket, axis: [f64; 3], phi: &Ket) -> Result<C64> {
    let s = sigma(axis)?;
    let den = phi.dotc(psi);
    if den.norm() < OVERLAP_FLOOR {
        return Err(invalid("pre- and post-selected states are nearly orthogonal"));
    }
    Ok(phi.dotc(&(s * psi)) / den)
}

/// System on qubit 0, meter on qubit 1 starting in `|0⟩`. The coupling
/// `exp(−i (g/2) σ_n̂ ⊗ σ_y)` is followed by a rotation taking `φ` to `|0⟩`
/// and full depolarization of the meter on the failed (`|1⟩`) branch. The
/// meter's `⟨σx⟩`, `⟨σy⟩` divided by `g` and the success probability give the
/// real and imaginary parts.
pub fn weak_value(psi: &Ket, axis: [f64; 3], phi: &Ket, g: f64) -> Result<WeakValueEstimate> {
    if psi.len() != 2 || phi.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: psi.len().max(phi.len()) });
    }
    if !(g > 0.0) {
        return Err(invalid("coupling strength must be positive"));
    }
    let psi = psi / qop::r(psi.norm());
    let phi = phi / qop::r(phi.norm());
    let analytic = analytic_weak_value(&psi, axis, &phi)?;
    let coupling = qop::expm_hermitian(&qop::tensor(&sigma(axis)?, &Pauli::Y.matrix()), g / 2.0);
    let meter0 = qop::basis(2, 0);
    let start = qop::projector(&kron(&psi, &meter0));
    let mut rho = qop::conjugate(&start, &coupling);
    // V|φ⟩ = |0⟩, V|φ⊥⟩ = |1⟩
    let perp = Ket::from_vec(vec![-phi[1].conj(), phi[0].conj()]);
    let v = Mat::from_rows(&[phi.adjoint(), perp.adjoint()]);
    rho = qop::apply_local(&rho, &v, &[0], 2)?;
    let p0 = Mat::from_row_slice(2, 2, &[qop::r(1.0), qop::r(0.0), qop::r(0.0), qop::r(0.0)]);
    let p1 = qop::identity(2) - &p0;
    let keep = qop::apply_local(&rho, &p0, &[0], 2)?;
    let fail = qop::apply_local(&rho, &p1, &[0], 2)?;
    let fail_sys = qop::partial_trace(&fail, &[0])?;
    rho = keep + qop::tensor(&fail_sys, &qop::maximally_mixed(1));
    let success = qop::partial_trace(&rho, &[0])?[(0, 0)].re;
    if success < OVERLAP_FLOOR * OVERLAP_FLOOR {
        return Err(invalid("post-selection signal below the numeric floor"));
    }
    let meter_x = qop::trace_product(&rho, &qop::tensor(&qop::identity(2), &Pauli::X.matrix())).re;
    let meter_y = qop::trace_product(&rho, &qop::tensor(&qop::identity(2), &Pauli::Y.matrix())).re;
    Ok(WeakValueEstimate {
        re: meter_x / (g * success),
        im: meter_y / (g * success),
        analytic_re: analytic.re,
        analytic_im: analytic.im,
        success_probability: success,
    })
}

fn kron(a: &Ket, b: &Ket) -> Ket {
    Ket::from_iterator(a.len() * b.len(), a.iter().flat_map(|x| b.iter().map(move |y| x * y)))
}

/// Angle `θ` for which `ψ = cosθ|0⟩ + sinθ|1⟩`, `φ = cosθ|0⟩ − sinθ|1⟩` give
/// a `σz` weak value of `target = 1/cos2θ`.
pub fn theta_for_weak_value(target: f64) -> Result<f64> {
    if !(target >= 1.0) {
        return Err(invalid("this family reaches only weak values of at least 1"));
    }
    Ok((1.0 / target).acos() / 2.0)
}

pub fn theta_states(theta: f64) -> (Ket, Ket) {
    let (c, s) = (theta.cos(), theta.sin());
    (Ket::from_vec(vec![qop::r(c), qop::r(s)]), Ket::from_vec(vec![qop::r(c), qop::r(-s)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenstate_weak_value() {
        let z0 = qop::basis(2, 0);
        let w = weak_value(&z0, [0.0, 0.0, 1.0], &z0, 0.01).unwrap();
        assert!((w.value() - qop::r(1.0)).norm() < 1e-3);
        assert!((w.analytic() - qop::r(1.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_and_large_values() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = Ket::from_vec(vec![qop::r(s), qop::c(0.0, s)]);
        let w = weak_value(&qop::basis(2, 0), [1.0, 0.0, 0.0], &phi, 0.01).unwrap();
        assert!((w.analytic() - qop::c(0.0, -1.0)).norm() < 1e-14);
        assert!((w.value() - w.analytic()).norm() < 0.05);
        let th = theta_for_weak_value(2.3).unwrap();
        let (psi, phi) = theta_states(th);
        let w = weak_value(&psi, [0.0, 0.0, 1.0], &phi, 0.02).unwrap();
        assert!((w.analytic_re - 2.3).abs() < 1e-12);
        assert!((w.re - 2.3).abs() < 0.05, "{w:?}");
    }

    #[test]
    fn orthogonal_post_selection_rejected() {
        let r = weak_value(&qop::basis(2, 0), [0.0, 0.0, 1.0], &qop::basis(2, 1), 0.1);
        assert!(r.is_err());
    }
}
