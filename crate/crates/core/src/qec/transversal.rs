// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Error propagation through a logical CNOT between two bit-flip blocks
//! (qubits 0..3 control block, 3..6 target block).

use serde::Serialize;

use crate::clifford::gates::{circuit_dense, circuit_tableau, CliffordGate};
use crate::error::{Error, Result};
use crate::qop::pauli::PauliString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CnotVariant {
    /// Physical qubit 0 of block 1 controls every qubit of block 2.
    Bad,
    /// Qubit `i` of block 1 controls qubit `i` of block 2.
    Transversal,
}

impl CnotVariant {
    pub fn gates(self) -> Vec<CliffordGate> {
        match self {
            CnotVariant::Bad => (3..6).map(|t| CliffordGate::Cnot(0, t)).collect(),
            CnotVariant::Transversal => (0..3).map(|i| CliffordGate::Cnot(i, i + 3)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagatedError {
    pub output: String,
    pub weight_block1: usize,
    pub weight_block2: usize,
}

/// Pushes `error` (applied before the gate) through the logical CNOT and
/// reports the error weight left on each block.
pub fn transversal_cnot_demo(variant: CnotVariant, error: Option<&PauliString>) -> Result<PropagatedError> {
    let gates = variant.gates();
    let err = error.cloned().unwrap_or_else(|| PauliString::identity(6));
    if err.n() != 6 {
        return Err(Error::DimensionMismatch { expected: 6, got: err.n() });
    }
    let out = circuit_tableau(&gates, 6)?.conjugate(&err);
    // dense cross-check of the tableau propagation
    let u = circuit_dense(&gates, 6)?;
    let dense = &u * err.dense() * u.adjoint();
    debug_assert!(crate::qop::max_abs_diff(&dense, &out.dense()) < 1e-12);
    let support = out.support();
    Ok(PropagatedError {
        output: out.to_string(),
        weight_block1: support.iter().filter(|&&q| q < 3).count(),
        weight_block2: support.iter().filter(|&&q| q >= 3).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qop::pauli::Pauli;

    #[test]
    fn fan_out_spreads_and_transversal_does_not() {
        for v in [CnotVariant::Bad, CnotVariant::Transversal] {
            assert_eq!(transversal_cnot_demo(v, None).unwrap().weight_block2, 0);
        }
        let x0 = PauliString::single(6, 0, Pauli::X);
        assert_eq!(transversal_cnot_demo(CnotVariant::Bad, Some(&x0)).unwrap().weight_block2, 3);
        assert_eq!(transversal_cnot_demo(CnotVariant::Transversal, Some(&x0)).unwrap().weight_block2, 1);
    }

    #[test]
    fn transversal_never_exceeds_weight_one() {
        for q in 0..6 {
            for l in [Pauli::X, Pauli::Z] {
                let e = PauliString::single(6, q, l);
                let r = transversal_cnot_demo(CnotVariant::Transversal, Some(&e)).unwrap();
                assert!(r.weight_block2 <= 1 && r.weight_block1 <= 1, "{e}: {r:?}");
            }
        }
    }
}
