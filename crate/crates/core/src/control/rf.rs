// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! RF-selection modeled as truncation of the B1 scale distribution.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Histogram of relative B1 scales; each bin is treated as uniformly filled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B1Histogram {
    pub edges: Vec<f64>,
    pub weights: Vec<f64>,
}

impl B1Histogram {
    pub fn new(edges: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let h = B1Histogram { edges, weights };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.edges.len() != self.weights.len() + 1 || self.weights.is_empty() {
            return Err(invalid("histogram needs one more edge than weights"));
        }
        if self.edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("histogram edges must increase"));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(invalid("histogram weights must be nonnegative"));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("histogram weights sum to {total}, expected 1")));
        }
        Ok(())
    }

    /// Bundled profile calibrated so a ±2% window keeps 12% of the signal.
    pub fn default_fixture() -> Self {
        Self::from_json(include_str!("../../fixtures/rf_profile.json")).expect("bundled RF profile is valid")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let h: B1Histogram = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        h.validate()?;
        Ok(h)
    }

    /// `(scale, weight)` pairs at bin centres, for robust GRAPE averaging.
    pub fn as_distribution(&self) -> Vec<(f64, f64)> {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| (0.5 * (self.edges[i] + self.edges[i + 1]), *w))
            .collect()
    }
}

/// Fraction of the ensemble whose B1 scale lies within `1 ± window`.
pub fn rf_selection_retention(window: f64, hist: &B1Histogram) -> Result<f64> {
    hist.validate()?;
    if !(window >= 0.0) {
        return Err(invalid("homogeneity window must be nonnegative"));
    }
    let (a, b) = (1.0 - window, 1.0 + window);
    let kept = hist
        .weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let (lo, hi) = (hist.edges[i], hist.edges[i + 1]);
            let overlap = (hi.min(b) - lo.max(a)).max(0.0);
            w * overlap / (hi - lo)
        })
        .sum::<f64>();
    Ok(kept.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_limits() {
        let h = B1Histogram::default_fixture();
        assert!((rf_selection_retention(1.0, &h).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(rf_selection_retention(0.0, &h).unwrap(), 0.0);
    }

    #[test]
    fn retention_grows_with_window() {
        let h = B1Histogram::default_fixture();
        let vals: Vec<f64> = (0..30).map(|k| rf_selection_retention(k as f64 * 0.01, &h).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn uniform_histogram_is_linear() {
        let h = B1Histogram::new(vec![0.5, 1.0, 1.5], vec![0.5, 0.5]).unwrap();
        assert!((rf_selection_retention(0.25, &h).unwrap() - 0.5).abs() < 1e-15);
        assert!(B1Histogram::new(vec![0.5, 1.0], vec![0.7]).is_err());
    }
}
