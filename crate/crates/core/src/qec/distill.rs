// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Five-to-one magic-state distillation with the [[5,1,3]] code.

use std::sync::OnceLock;

use serde::Serialize;

use super::StabilizerCode;
use crate::clifford::CliffordTableau;
use crate::error::{invalid, Result};
use crate::qop::pauli::Pauli;
use crate::qop::{self, Mat};

const INV_SQRT3: f64 = 0.577_350_269_189_625_8;

/// `[I + p (σx + σy + σz)/√3] / 2`.
pub fn magic_state(p: f64) -> Result<Mat> {
    if !(-1.0..=1.0).contains(&p) {
        return Err(invalid(format!("polarization {p} outside [-1, 1]")));
    }
    let mut m = qop::identity(2);
    for l in [Pauli::X, Pauli::Y, Pauli::Z] {
        m += l.matrix() * qop::r(p * INV_SQRT3);
    }
    Ok(m * qop::r(0.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MPolarization {
    /// `2 Tr(ρ_M ρ)`, equal to 2 for a perfect magic state.
    pub literal: f64,
    /// Bloch projection on the magic axis, `2 Tr(ρ_M ρ) − 1`.
    pub projection: f64,
}

pub fn m_polarization(rho: &Mat) -> Result<MPolarization> {
    qop::validate_density(rho, qop::Slack::default())?;
    if rho.nrows() != 2 {
        return Err(crate::Error::DimensionMismatch { expected: 2, got: rho.nrows() });
    }
    let literal = 2.0 * qop::trace_product(&magic_state(1.0)?, rho).re;
    Ok(MPolarization { literal, projection: literal - 1.0 })
}

fn bloch(rho: &Mat) -> [f64; 3] {
    [Pauli::X, Pauli::Y, Pauli::Z].map(|l| qop::trace_product(&l.matrix(), rho).re)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistillResult {
    pub p_in: f64,
    pub p_out: f64,
    pub success_probability: f64,
    /// Output Bloch component orthogonal to the magic axis.
    pub off_axis: f64,
}

/// Single-qubit Clifford taking the raw decoded axis onto `+(1,1,1)/√3`.
fn axis_correction() -> &'static Mat {
    static FIX: OnceLock<Mat> = OnceLock::new();
    FIX.get_or_init(|| {
        let (raw, _) = decode_postselect(1.0).expect("perfect inputs decode");
        let b = bloch(&raw);
        CliffordTableau::single_qubit_group()
            .iter()
            .map(|c| c.to_dense())
            .find(|u| {
                let v = bloch(&qop::conjugate(&raw, u));
                v.iter().all(|x| (x - INV_SQRT3).abs() < 1e-9)
            })
            .unwrap_or_else(|| panic!("decoded perfect input has non-magic axis {b:?}"))
    })
}

/// Inverse encoder on five copies, postselect qubits 0..4 in `|0⟩`; returns
/// the normalized data qubit and the acceptance probability.
fn decode_postselect(p: f64) -> Result<(Mat, f64)> {
    let code = StabilizerCode::five_qubit();
    let one = magic_state(p)?;
    let rho = qop::tensor_all(&[one.clone(), one.clone(), one.clone(), one.clone(), one]);
    let e = code.encoder_dense()?;
    let back = e.adjoint() * rho * e;
    // qubits 0..3 zero, qubit 4 free: indices 0 and 1
    let out = back.view((0, 0), (2, 2)).into_owned();
    let ps = out.trace().re;
    Ok((out / qop::r(ps), ps))
}

pub fn distill_magic(p_in: f64) -> Result<DistillResult> {
    if !(-1.0..=1.0).contains(&p_in) {
        return Err(invalid(format!("polarization {p_in} outside [-1, 1]")));
    }
    let (raw, success) = decode_postselect(p_in)?;
    let out = qop::conjugate(&raw, axis_correction());
    let p_out = m_polarization(&out)?.projection;
    let off = bloch(&out).iter().map(|x| (x - p_out * INV_SQRT3).powi(2)).sum::<f64>().sqrt();
    Ok(DistillResult { p_in, p_out, success_probability: success, off_axis: off })
}

/// Repeated rounds, feeding each output polarization into the next round.
pub fn distill_rounds(p_in: f64, rounds: usize) -> Result<Vec<DistillResult>> {
    let mut p = p_in;
    let mut out = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let r = distill_magic(p)?;
        p = r.p_out.clamp(-1.0, 1.0);
        out.push(r);
    }
    Ok(out)
}

/// Input polarization where `p_out = p_in`, by bisection on `[lo, hi]`.
pub fn distillation_threshold(lo: f64, hi: f64) -> Result<f64> {
    let gain = |p: f64| distill_magic(p).map(|r| r.p_out - p);
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (gain(a)?, gain(b)?);
    if ga.signum() == gb.signum() {
        return Err(invalid("threshold is not bracketed"));
    }
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if gain(m)?.signum() == ga.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarization_conventions() {
        let m = m_polarization(&magic_state(1.0).unwrap()).unwrap();
        assert!((m.literal - 2.0).abs() < 1e-14 && (m.projection - 1.0).abs() < 1e-14);
        let m = m_polarization(&qop::maximally_mixed(1)).unwrap();
        assert!((m.literal - 1.0).abs() < 1e-14 && m.projection.abs() < 1e-14);
        let m = m_polarization(&magic_state(0.65).unwrap()).unwrap();
        assert!((m.projection - 0.65).abs() < 1e-14);
        assert!(magic_state(1.2).is_err());
    }

    #[test]
    fn perfect_inputs_are_a_fixed_point() {
        let r = distill_magic(1.0).unwrap();
        assert!((r.p_out - 1.0).abs() < 1e-10);
        assert!((r.success_probability - 1.0 / 6.0).abs() < 1e-10);
    }

    #[test]
    fn threshold_and_direction() {
        assert!(distill_magic(0.9).unwrap().p_out > 0.9);
        assert!(distill_magic(0.5).unwrap().p_out < 0.5);
        let t = distillation_threshold(0.5, 0.9).unwrap();
        assert!((t - 0.6547).abs() < 1e-3, "{t}");
        for k in 0..20 {
            let p = 0.5 + 0.5 * k as f64 / 19.0;
            assert!(distill_magic(p).unwrap().off_axis < 1e-10);
        }
    }

    #[test]
    fn monotone_above_threshold() {
        let v: Vec<f64> = (0..20).map(|k| distill_magic(0.7 + 0.3 * k as f64 / 19.0).unwrap().p_out).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
}
