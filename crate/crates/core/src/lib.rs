// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Density-matrix simulation of liquid-state NMR quantum information
//! processing on 2 to 7 spins.
//!
//! Qubit 0 is the most significant (leftmost) tensor factor everywhere.

// NaN-rejecting range checks are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clifford;
pub mod control;
pub mod error;
pub mod experiments;
pub mod harness;
pub mod noise;
pub mod qec;
pub mod qop;
pub mod spin;

pub use error::{Error, Result};
pub use noise::Channel;
pub use qop::pauli::{Pauli, PauliString};
pub use qop::{Mat, C64};
