// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Per-experiment JSON configuration. Every field has a default, so `{}` is
//! a valid config for any experiment and unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::control::GrapeConfig;
use crate::experiments::TransferChain;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrapeRun {
    /// Bundled preset name, ignored when `molecule_path` is set.
    pub molecule: String,
    /// Molecule JSON, relative paths resolved against the config file.
    pub molecule_path: Option<PathBuf>,
    pub control: usize,
    pub target: usize,
    pub n_steps: usize,
    pub dt: f64,
    /// Seed of the initial pulse; the run seed when absent.
    pub init_seed: Option<u64>,
    pub grape: GrapeConfig,
}

impl Default for GrapeRun {
    fn default() -> Self {
        GrapeRun {
            molecule: "chloroform".into(),
            molecule_path: None,
            control: 0,
            target: 1,
            n_steps: 500,
            dt: 1e-5,
            init_seed: Some(7),
            grape: GrapeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwirlRun {
    /// Any of `"strong"` (Pr(0) = 0.44) and `"weak"` (0.84).
    pub fixtures: Vec<String>,
    pub delta: f64,
    pub n_samples: Option<usize>,
    pub repeats: usize,
}

impl Default for TwirlRun {
    fn default() -> Self {
        TwirlRun { fixtures: vec!["strong".into(), "weak".into()], delta: 0.02, n_samples: None, repeats: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyRun {
    /// Depolarizing strengths after a CNOT.
    pub depolarizing: Vec<f64>,
    pub delta: f64,
    pub n_samples: Option<usize>,
}

impl Default for CertifyRun {
    fn default() -> Self {
        CertifyRun { depolarizing: vec![0.05, 0.1, 0.2], delta: 0.02, n_samples: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbRun {
    pub n: usize,
    /// Injected per-gate infidelity.
    pub infidelity: f64,
    pub lengths: Vec<usize>,
    pub sequences: usize,
}

impl Default for RbRun {
    fn default() -> Self {
        RbRun { n: 3, infidelity: 4.7e-3, lengths: vec![1, 10, 25, 50, 100, 150, 200, 300], sequences: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QecRun {
    /// `bit_flip`, `phase_flip` or `five_qubit`.
    pub codes: Vec<String>,
    /// `I`, `X` or `H`.
    pub gate: String,
}

impl Default for QecRun {
    fn default() -> Self {
        QecRun { codes: vec!["bit_flip".into(), "phase_flip".into(), "five_qubit".into()], gate: "I".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistillRun {
    pub p_in: Vec<f64>,
    pub rounds: usize,
}

impl Default for DistillRun {
    fn default() -> Self {
        DistillRun { p_in: (0..=20).map(|k| 0.5 + 0.025 * k as f64).collect(), rounds: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Dqc1Run {
    /// Target qubits of the random unitaries.
    pub n: usize,
    pub instances: usize,
    pub epsilon: f64,
}

impl Default for Dqc1Run {
    fn default() -> Self {
        Dqc1Run { n: 2, instances: 10, epsilon: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContextualityRun {
    pub states: usize,
    /// Three-qubit depolarizing strength after each meter coupling; the
    /// calibrated value when absent.
    pub meter_noise: Option<f64>,
}

impl Default for ContextualityRun {
    fn default() -> Self {
        ContextualityRun { states: 20, meter_noise: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeakRun {
    /// Target σz weak value of the real-state family.
    pub target: f64,
    pub couplings: Vec<f64>,
}

impl Default for WeakRun {
    fn default() -> Self {
        WeakRun { target: 2.3, couplings: vec![0.01, 0.02, 0.05, 0.1, 0.2] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsingRun {
    pub j: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub points: usize,
}

impl Default for IsingRun {
    fn default() -> Self {
        IsingRun { j: 1.0, h_min: -4.0, h_max: 4.0, points: 801 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct XxzRun {
    pub n: usize,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub step: f64,
    pub restarts: usize,
}

impl Default for XxzRun {
    fn default() -> Self {
        XxzRun { n: 4, gamma_min: -2.0, gamma_max: 2.0, step: 0.01, restarts: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferRun {
    pub chain: TransferChain,
    pub source: usize,
    /// `[re, im]` amplitudes of `|0⟩` and `|j⟩`.
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub iterations: usize,
    /// Also run the end-to-end entangling variant.
    pub entangle: bool,
}

impl Default for TransferRun {
    fn default() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        TransferRun {
            chain: TransferChain::fixture(),
            source: 1,
            alpha: [s, 0.0],
            beta: [s, 0.0],
            iterations: 100,
            entangle: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumRun {
    pub molecule: String,
    pub molecule_path: Option<PathBuf>,
    /// Dimensionless Zeeman polarization of the thermal state.
    pub beta: f64,
    pub duration: f64,
    pub samples: usize,
}

impl Default for SpectrumRun {
    fn default() -> Self {
        SpectrumRun { molecule: "chloroform".into(), molecule_path: None, beta: 1e-4, duration: 1.0, samples: 4096 }
    }
}
