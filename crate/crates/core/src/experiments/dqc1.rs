// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! One-clean-qubit trace estimation.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::clifford::CliffordGate;
use crate::control::{rotation, Axis};
use crate::error::{invalid, Error, Result};
use crate::qop::pauli::Pauli;
use crate::qop::{self, Mat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Dqc1Mode {
    Exact,
    /// Each of `⟨σx⟩`, `⟨σy⟩` is the mean of `shots` ±1 outcomes.
    Sampled { shots: u64 },
}

#[derive(Debug, Clone)]
pub struct Dqc1Instance {
    pub u: Mat,
    pub epsilon: f64,
    pub mode: Dqc1Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dqc1Estimate {
    pub re: f64,
    pub im: f64,
    /// Per-component standard error (zero in exact mode).
    pub stderr: f64,
}

impl Dqc1Estimate {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// Controlled-`u` with the control on qubit 0.
fn controlled(u: &Mat) -> Mat {
    let d = u.nrows();
    let mut m = Mat::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(u);
    m
}

/// `[2ε|0⟩⟨0| + (1 − ε) I] / 2 ⊗ I/2^n`, a unit-trace version of the
/// clean-qubit input.
pub fn dqc1_input(n: usize, epsilon: f64) -> Mat {
    let mut c = qop::identity(2) * qop::r((1.0 - epsilon) / 2.0);
    c[(0, 0)] += qop::r(epsilon);
    qop::tensor(&c, &qop::maximally_mixed(n))
}

/// Output state of `H` on the control followed by controlled-`u`.
pub fn dqc1_output_state(u: &Mat, epsilon: f64) -> Result<Mat> {
    let n = qop::num_qubits(u.nrows())?;
    qop::validate_unitary(u, qop::Slack::default())?;
    let rho = dqc1_input(n, epsilon);
    let rho = qop::apply_local(&rho, &CliffordGate::H(0).local_matrix(), &[0], n + 1)?;
    Ok(qop::conjugate(&rho, &controlled(u)))
}

fn read<R: Rng + ?Sized>(sx: f64, sy: f64, epsilon: f64, mode: Dqc1Mode, rng: &mut R) -> Result<Dqc1Estimate> {
    match mode {
        Dqc1Mode::Exact => Ok(Dqc1Estimate { re: sx / epsilon, im: sy / epsilon, stderr: 0.0 }),
        Dqc1Mode::Sampled { shots } => {
            if shots == 0 {
                return Err(invalid("shots must be positive"));
            }
            let mut sample = |m: f64| -> Result<f64> {
                let p = ((1.0 + m) / 2.0).clamp(0.0, 1.0);
                let k = Binomial::new(shots, p).map_err(|e| invalid(e.to_string()))?.sample(rng);
                Ok(2.0 * k as f64 / shots as f64 - 1.0)
            };
            let (x, y) = (sample(sx)?, sample(sy)?);
            let se = (1.0 / shots as f64).sqrt() / epsilon.abs();
            Ok(Dqc1Estimate { re: x / epsilon, im: y / epsilon, stderr: se })
        }
    }
}

/// Estimates `Tr(U)/2^n` from the control's `⟨σx⟩ + i⟨σy⟩`, divided by `ε`.
pub fn dqc1_trace<R: Rng + ?Sized>(inst: &Dqc1Instance, rng: &mut R) -> Result<Dqc1Estimate> {
    if inst.epsilon == 0.0 || !(inst.epsilon.abs() <= 1.0) {
        return Err(invalid("control polarization must be nonzero and at most 1"));
    }
    let out = dqc1_output_state(&inst.u, inst.epsilon)?;
    let control = qop::partial_trace(&out, &[0])?;
    let sx = qop::trace_product(&control, &Pauli::X.matrix()).re;
    let sy = qop::trace_product(&control, &Pauli::Y.matrix()).re;
    read(sx, sy, inst.epsilon, inst.mode, rng)
}

/// Transpose on the control qubit (qubit 0) of an `(1 + n)`-qubit operator.
pub fn partial_transpose_control(rho: &Mat) -> Mat {
    let h = rho.nrows() / 2;
    let mut out = rho.clone();
    let off = rho.view((0, h), (h, h)).into_owned();
    let off_t = rho.view((h, 0), (h, h)).into_owned();
    out.view_mut((0, h), (h, h)).copy_from(&off_t);
    out.view_mut((h, 0), (h, h)).copy_from(&off);
    out
}

/// `cos²θ · Tr(A)/2^{n−1} + sin²θ · Tr(B)/2^{n−1}` for `u = A ⊕ B` split on the
/// first target qubit.
pub fn weighted_block_trace(u: &Mat, theta: f64) -> Result<C64> {
    let (a, b) = blocks(u)?;
    let m = a.nrows() as f64;
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    Ok(a.trace() * qop::r(c2 / m) + b.trace() * qop::r(s2 / m))
}

fn blocks(u: &Mat) -> Result<(Mat, Mat)> {
    let n = qop::num_qubits(u.nrows())?;
    if n < 1 {
        return Err(invalid("block trace needs at least one target qubit"));
    }
    let h = u.nrows() / 2;
    let off = qop::max_abs(&u.view((0, h), (h, h)).into_owned()).max(qop::max_abs(&u.view((h, 0), (h, h)).into_owned()));
    if off > 1e-12 {
        return Err(Error::InvalidOperator("block diagonal in the first target qubit"));
    }
    Ok((u.view((0, 0), (h, h)).into_owned(), u.view((h, h), (h, h)).into_owned()))
}

/// Two-clean-qubit variant: the first target qubit starts pseudo-pure and is
/// rotated to `cosθ|0⟩ + sinθ|1⟩`, so the readout weights the blocks of `u`
/// by `cos²θ` and `sin²θ`.
pub fn dqc1_block_trace<R: Rng + ?Sized>(
    u: &Mat,
    theta: f64,
    epsilon: f64,
    mode: Dqc1Mode,
    rng: &mut R,
) -> Result<Dqc1Estimate> {
    blocks(u)?;
    qop::validate_unitary(u, qop::Slack::default())?;
    if epsilon == 0.0 || !(epsilon.abs() <= 1.0) {
        return Err(invalid("pseudo-pure polarization must be nonzero and at most 1"));
    }
    let n = qop::num_qubits(u.nrows())?;
    let total = n + 1;
    // (1 − ε') I/4 + ε'|00⟩⟨00| on (control, first target), rest maximally mixed
    let mut two = qop::identity(4) * qop::r((1.0 - epsilon) / 4.0);
    two[(0, 0)] += qop::r(epsilon);
    let rho = qop::tensor(&two, &qop::maximally_mixed(n - 1));
    let rho = qop::apply_local(&rho, &rotation(Axis::Y, 2.0 * theta, 0, 1)?, &[1], total)?;
    let rho = qop::apply_local(&rho, &CliffordGate::H(0).local_matrix(), &[0], total)?;
    let out = qop::conjugate(&rho, &controlled(u));
    let control = qop::partial_trace(&out, &[0])?;
    let sx = qop::trace_product(&control, &Pauli::X.matrix()).re;
    let sy = qop::trace_product(&control, &Pauli::Y.matrix()).re;
    read(sx, sy, epsilon, mode, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exact(u: Mat, eps: f64) -> C64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        dqc1_trace(&Dqc1Instance { u, epsilon: eps, mode: Dqc1Mode::Exact }, &mut rng).unwrap().value()
    }

    #[test]
    fn simple_traces() {
        assert!((exact(qop::identity(4), 1.0) - qop::r(1.0)).norm() < 1e-14);
        assert!(exact(qop::tensor(&Pauli::X.matrix(), &qop::identity(2)), 0.3).norm() < 1e-14);
        let d = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![qop::r(1.0), qop::r(1.0), qop::r(1.0), qop::c(0.0, 1.0)]));
        assert!((exact(d, 0.05) - qop::c(0.75, 0.25)).norm() < 1e-13);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let bad = Dqc1Instance { u: qop::identity(2), epsilon: 0.0, mode: Dqc1Mode::Exact };
        assert!(dqc1_trace(&bad, &mut rng).is_err());
    }

    #[test]
    fn control_is_never_entangled() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let u = qop::random_unitary(4, &mut rng);
            let out = dqc1_output_state(&u, 0.7).unwrap();
            let (vals, _) = qop::herm_eig(&partial_transpose_control(&out));
            assert!(vals[0] > -1e-12);
        }
    }

    #[test]
    fn block_trace_cancellation() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let i4 = qop::identity(4);
        let e = dqc1_block_trace(&qop::identity(8), 0.4, 0.2, Dqc1Mode::Exact, &mut rng).unwrap();
        assert!((e.value() - qop::r(1.0)).norm() < 1e-12);
        let mut pm = qop::identity(8);
        pm.view_mut((4, 4), (4, 4)).copy_from(&(-i4));
        let e = dqc1_block_trace(&pm, std::f64::consts::FRAC_PI_4, 1.0, Dqc1Mode::Exact, &mut rng).unwrap();
        assert!(e.value().norm() < 1e-12);
        assert!(dqc1_block_trace(&qop::random_unitary(8, &mut rng), 0.3, 1.0, Dqc1Mode::Exact, &mut rng).is_err());
    }
}
