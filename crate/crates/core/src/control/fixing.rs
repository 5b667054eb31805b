// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulated hardware distortion and the iterative pulse-fixing loop.

use serde::{Deserialize, Serialize};

use super::pulse::ControlPulse;
use crate::error::{invalid, Error, Result};

/// Linear convolution over steps followed by a monotone amplitude gain.
///
/// The fixing loop contracts when `Σ_k |δ_k − κ_k| · max slope < 1`, with
/// `κ` the kernel and the slope taken over the gain curve; a pure gain
/// `g ∈ (0, 2)` with the identity kernel is the simplest such case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionModel {
    /// Odd-length kernel centred on the current step; must sum to 1.
    pub kernel: Vec<f64>,
    /// `(input, output)` magnitude pairs, nondecreasing in both; applied
    /// symmetrically to signed amplitudes with linear extrapolation.
    pub gain: Vec<(f64, f64)>,
}

impl DistortionModel {
    pub fn identity() -> Self {
        DistortionModel { kernel: vec![1.0], gain: Vec::new() }
    }

    pub fn pure_gain(g: f64) -> Self {
        DistortionModel { kernel: vec![1.0], gain: vec![(0.0, 0.0), (1.0, g)] }
    }

    pub fn smoothing(kernel: Vec<f64>) -> Self {
        DistortionModel { kernel, gain: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kernel.is_empty() || self.kernel.len().is_multiple_of(2) {
            return Err(invalid("distortion kernel must have odd length"));
        }
        let dc: f64 = self.kernel.iter().sum();
        if (dc - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("distortion kernel must have unit DC gain, got {dc}")));
        }
        if self.gain.len() == 1 {
            return Err(invalid("gain curve needs at least two points"));
        }
        if self.gain.windows(2).any(|w| !(w[1].0 > w[0].0) || w[1].1 < w[0].1) {
            return Err(invalid("gain curve must be strictly increasing in input and nondecreasing in output"));
        }
        Ok(())
    }

    fn gain_at(&self, x: f64) -> f64 {
        if self.gain.is_empty() {
            return x;
        }
        let a = x.abs();
        let g = &self.gain;
        let k = g.partition_point(|p| p.0 <= a).clamp(1, g.len() - 1);
        let (x0, y0) = g[k - 1];
        let (x1, y1) = g[k];
        let y = y0 + (y1 - y0) * (a - x0) / (x1 - x0);
        y.copysign(x)
    }

    /// Distorts one channel's time series (zero-padded "same" convolution).
    pub fn apply_series(&self, u: &[f64]) -> Vec<f64> {
        let g: Vec<f64> = u.iter().map(|&x| self.gain_at(x)).collect();
        let half = self.kernel.len() / 2;
        (0..g.len())
            .map(|m| {
                self.kernel
                    .iter()
                    .enumerate()
                    .filter_map(|(k, w)| (m + half).checked_sub(k).and_then(|idx| g.get(idx)).map(|v| w * v))
                    .sum()
            })
            .collect()
    }

    pub fn apply(&self, pulse: &ControlPulse) -> ControlPulse {
        let mut out = pulse.clone();
        for ch in 0..pulse.n_channels() {
            out.set_channel_series(ch, &self.apply_series(&pulse.channel_series(ch)));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct PulseFixReport {
    pub commanded: ControlPulse,
    /// Max-norm of `designed − D(commanded)` after each loop.
    pub residuals: Vec<f64>,
}

fn residual(designed: &ControlPulse, produced: &ControlPulse) -> f64 {
    designed
        .steps()
        .iter()
        .flatten()
        .zip(produced.steps().iter().flatten())
        .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// Iteratively adjusts the commanded pulse so the distorted output
/// approaches `designed`: `c ← c + (designed − D(c))`.
///
/// Aborts when the residual grows on two consecutive loops.
pub fn pulse_fix(designed: &ControlPulse, distortion: &DistortionModel, n_loops: usize) -> Result<PulseFixReport> {
    distortion.validate()?;
    let mut commanded = designed.clone();
    let mut residuals = Vec::with_capacity(n_loops);
    let mut last = residual(designed, &distortion.apply(&commanded));
    let mut growth = 0;
    for loop_index in 1..=n_loops {
        let produced = distortion.apply(&commanded);
        for m in 0..commanded.n_steps() {
            for k in 0..commanded.n_channels() {
                let v = commanded.amplitude(m, k) + designed.amplitude(m, k) - produced.amplitude(m, k);
                commanded.set_amplitude(m, k, v);
            }
        }
        let res = residual(designed, &distortion.apply(&commanded));
        residuals.push(res);
        growth = if res > last { growth + 1 } else { 0 };
        if growth >= 2 || !res.is_finite() {
            return Err(Error::Divergence { loop_index, residual: res });
        }
        last = res;
    }
    Ok(PulseFixReport { commanded, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn designed() -> ControlPulse {
        let steps = (0..60).map(|m| vec![(m as f64 * 0.2).sin() * 1000.0, (m as f64 * 0.05).cos() * 700.0]).collect();
        ControlPulse::new(1e-5, vec!["x".into(), "y".into()], steps).unwrap()
    }

    #[test]
    fn identity_distortion_is_fixed_immediately() {
        let d = designed();
        let rep = pulse_fix(&d, &DistortionModel::identity(), 10).unwrap();
        assert_eq!(rep.commanded, d);
        assert_eq!(rep.residuals[0], 0.0);
    }

    #[test]
    fn pure_gain_converges_to_inverse() {
        let d = designed();
        let rep = pulse_fix(&d, &DistortionModel::pure_gain(0.5), 40).unwrap();
        for (c, x) in rep.commanded.steps().iter().flatten().zip(d.steps().iter().flatten()) {
            assert!((c - 2.0 * x).abs() < 1e-6 * 1000.0);
        }
    }

    #[test]
    fn smoothing_kernel_residual_small_and_monotone() {
        let d = designed();
        let rep = pulse_fix(&d, &DistortionModel::smoothing(vec![0.1, 0.8, 0.1]), 10).unwrap();
        assert!(*rep.residuals.last().unwrap() < 0.01 * d.max_abs());
        assert!(rep.residuals.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn divergent_gain_aborts() {
        let err = pulse_fix(&designed(), &DistortionModel::pure_gain(2.5), 10).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn rejects_bad_models() {
        assert!(DistortionModel::smoothing(vec![0.5, 0.5]).validate().is_err());
        assert!(DistortionModel::smoothing(vec![0.2, 0.7, 0.2]).validate().is_err());
        let m = DistortionModel { kernel: vec![1.0], gain: vec![(0.0, 0.0), (1.0, 0.5), (2.0, 0.4)] };
        assert!(m.validate().is_err());
    }

    #[test]
    fn convolution_edges_are_zero_padded() {
        let m = DistortionModel::smoothing(vec![0.1, 0.8, 0.1]);
        let out = m.apply_series(&[1.0, 1.0, 1.0]);
        assert!((out[0] - 0.9).abs() < 1e-15 && (out[1] - 1.0).abs() < 1e-15 && (out[2] - 0.9).abs() < 1e-15);
    }
}
