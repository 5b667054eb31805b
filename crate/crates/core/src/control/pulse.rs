// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Piecewise-constant control pulses and their JSON file format.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default amplitude cap, rad/s.
pub const DEFAULT_U_MAX: f64 = 2.0 * std::f64::consts::PI * 20e3;

/// `N` steps of per-channel amplitudes (rad/s), each held for `dt` seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPulse {
    #[serde(rename = "dt_s")]
    dt: f64,
    channels: Vec<String>,
    steps: Vec<Vec<f64>>,
}

impl ControlPulse {
    pub fn new(dt: f64, channels: Vec<String>, steps: Vec<Vec<f64>>) -> Result<ControlPulse> {
        let p = ControlPulse { dt, channels, steps };
        p.validate()?;
        Ok(p)
    }

    pub fn zeros(dt: f64, channels: Vec<String>, n_steps: usize) -> Result<ControlPulse> {
        let k = channels.len();
        Self::new(dt, channels, vec![vec![0.0; k]; n_steps])
    }

    /// Uniform random amplitudes in `±fraction · u_max`.
    pub fn random<R: Rng + ?Sized>(
        dt: f64,
        channels: Vec<String>,
        n_steps: usize,
        u_max: f64,
        fraction: f64,
        rng: &mut R,
    ) -> Result<ControlPulse> {
        let k = channels.len();
        let a = fraction * u_max;
        let steps = (0..n_steps).map(|_| (0..k).map(|_| rng.random_range(-a..=a)).collect()).collect();
        Self::new(dt, channels, steps)
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid(format!("step duration {} must be positive", self.dt)));
        }
        let k = self.channels.len();
        if let Some(bad) = self.steps.iter().position(|s| s.len() != k) {
            return Err(invalid(format!("step {bad} has {} amplitudes, expected {k}", self.steps[bad].len())));
        }
        if self.steps.iter().flatten().any(|u| !u.is_finite()) {
            return Err(invalid("non-finite amplitude"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.n_steps() as f64
    }

    pub fn steps(&self) -> &[Vec<f64>] {
        &self.steps
    }

    pub fn amplitude(&self, step: usize, channel: usize) -> f64 {
        self.steps[step][channel]
    }

    pub fn set_amplitude(&mut self, step: usize, channel: usize, u: f64) {
        self.steps[step][channel] = u;
    }

    pub fn max_abs(&self) -> f64 {
        self.steps.iter().flatten().fold(0.0, |m, u| m.max(u.abs()))
    }

    /// Amplitude and phase of an (x, y) channel pair at one step, with
    /// `u_x = a cos φ`, `u_y = −a sin φ`.
    pub fn amplitude_phase(&self, step: usize, x: usize, y: usize) -> (f64, f64) {
        let (ux, uy) = (self.steps[step][x], self.steps[step][y]);
        (ux.hypot(uy), (-uy).atan2(ux))
    }

    /// Amplitudes of one channel across all steps.
    pub fn channel_series(&self, channel: usize) -> Vec<f64> {
        self.steps.iter().map(|s| s[channel]).collect()
    }

    pub fn set_channel_series(&mut self, channel: usize, values: &[f64]) {
        for (s, v) in self.steps.iter_mut().zip(values) {
            s[channel] = *v;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pulse serializes")
    }

    pub fn from_json(s: &str) -> Result<ControlPulse> {
        let p: ControlPulse = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<ControlPulse> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut g = ChaCha8Rng::seed_from_u64(1);
        let p = ControlPulse::random(1e-5, vec!["1H:x".into(), "1H:y".into()], 50, DEFAULT_U_MAX, 0.37, &mut g).unwrap();
        let back = ControlPulse::from_json(&p.to_json()).unwrap();
        for (a, b) in p.steps().iter().flatten().zip(back.steps().iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(p, back);
    }

    #[test]
    fn rejects_ragged_steps() {
        assert!(ControlPulse::new(1e-5, vec!["x".into()], vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(ControlPulse::new(0.0, vec!["x".into()], vec![]).is_err());
        assert!(ControlPulse::from_json(r#"{"dt_s":1e-5,"channels":["x"],"steps":[[1,2]]}"#).is_err());
    }

    #[test]
    fn amplitude_phase_view() {
        let p = ControlPulse::new(1.0, vec!["x".into(), "y".into()], vec![vec![0.0, -2.0]]).unwrap();
        let (a, phi) = p.amplitude_phase(0, 0, 1);
        assert!((a - 2.0).abs() < 1e-15);
        assert!((phi - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(p.duration(), 1.0);
    }
}
