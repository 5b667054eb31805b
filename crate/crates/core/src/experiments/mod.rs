// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Algorithm and simulation experiments.

pub mod contextuality;
pub mod dqc1;
pub mod ising;
pub mod transfer;
pub mod weak;
pub mod xxz;

pub use contextuality::{classical_beta_max, contextuality_beta, ContextMethod, ContextualityResult};
pub use dqc1::{dqc1_block_trace, dqc1_trace, Dqc1Estimate, Dqc1Instance, Dqc1Mode};
pub use ising::{ising_ground, magnetization_steps, IsingPoint, IsingResult};
pub use transfer::{entangle_ends, state_transfer, EntangleResult, TransferChain, TransferResult};
pub use weak::{weak_value, WeakValueEstimate};
pub use xxz::{xxz_ground_ge, XxzResult};
