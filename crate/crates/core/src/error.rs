// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors shared by every module of the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator is not {0}")]
    InvalidOperator(&'static str),

    #[error("channel is not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("unphysical parameters: {0}")]
    Unphysical(String),

    #[error("unitary is not a Clifford: {0}")]
    NotClifford(String),

    #[error("pulse fixing diverged at loop {loop_index} (residual {residual:.3e})")]
    Divergence { loop_index: usize, residual: f64 },

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("dynamics stalled: {0}")]
    Stalled(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
