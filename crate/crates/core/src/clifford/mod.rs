// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Clifford group tools: tableaux, twirled fidelity estimation and
//! randomized benchmarking.

pub mod gates;
pub mod rb;
pub mod tableau;
pub mod twirl;

pub use gates::{circuit_dense, circuit_tableau, cnot_tableau, CliffordGate};
pub use rb::{depolarizing_for_infidelity, fit_decay, randomized_benchmarking, RbFit, RbResult};
pub use tableau::{conjugate_pauli, equal_up_to_phase, sample_1q_clifford, CliffordTableau};
pub use twirl::{
    certify_clifford, certify_clifford_with, twirl_estimate_memory, twirl_estimate_memory_with, twirl_sample_count,
    weight_class_pauli_channel, MemoryFixture, TwirlEstimate, TwirlOptions,
};
