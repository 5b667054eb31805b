// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Scalable fidelity estimation by twirling with permutations and local
//! Cliffords.
//!
//! Each realization draws a qubit permutation `π` and local Cliffords `C`,
//! sets `T = C π`, and for every weight `w` feeds `Q_w = T Z_w T†` through
//! the channel. The per-realization value
//! `X = (1 + Σ_w C(n,w) 3^w λ(Q_w)) / 4^n`
//! is an unbiased estimate of the no-error probability.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use super::tableau::{sample_1q_clifford, CliffordTableau};
use crate::error::{invalid, Error, Result};
use crate::noise::Channel;
use crate::qop::pauli::{Pauli, PauliString};
use crate::qop;

/// Hoeffding range of the per-realization value.
pub const ESTIMATOR_RANGE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwirlOptions {
    /// Overrides [`twirl_sample_count`].
    pub n_samples: Option<usize>,
    /// Finite ensemble readout: each `λ` becomes the mean of this many ±1 outcomes.
    pub shots: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwirlEstimate {
    pub pr0_hat: f64,
    pub n_samples: usize,
    pub delta: f64,
    pub fbar: f64,
    pub stderr: f64,
    /// Mean `λ(Q_w)` for `w = 1..=n`.
    pub per_weight_mean: Vec<f64>,
}

impl TwirlEstimate {
    /// Hoeffding lower bound on `P(|pr0_hat − Pr(0)| < δ)`.
    pub fn confidence(&self) -> f64 {
        let r2 = ESTIMATOR_RANGE * ESTIMATOR_RANGE;
        (1.0 - 2.0 * (-2.0 * self.n_samples as f64 * self.delta * self.delta / r2).exp()).max(0.0)
    }
}

/// Realizations needed so the Hoeffding failure probability is at most `δ²/n`.
pub fn twirl_sample_count(n: usize, delta: f64) -> usize {
    let r2 = ESTIMATOR_RANGE * ESTIMATOR_RANGE;
    let l = (2.0 * n as f64 / (delta * delta)).ln().max(1.0);
    (r2 * l / (2.0 * delta * delta)).ceil() as usize
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Uniformly random `T = C π`.
pub fn random_twirl<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordTableau {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let local: Vec<CliffordTableau> = (0..n).map(|_| sample_1q_clifford(rng)).collect();
    CliffordTableau::permutation(&perm).expect("shuffled range").then(&CliffordTableau::from_local(&local))
}

fn run<R: Rng + ?Sized>(
    n: usize,
    delta: f64,
    opts: TwirlOptions,
    rng: &mut R,
    mut lambda: impl FnMut(&PauliString) -> Result<f64>,
) -> Result<TwirlEstimate> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta must lie in (0, 1)"));
    }
    if n == 0 {
        return Err(invalid("need at least one qubit"));
    }
    let n_samples = opts.n_samples.unwrap_or_else(|| twirl_sample_count(n, delta));
    if n_samples < 2 {
        return Err(invalid("need at least two realizations"));
    }
    let dd = 4f64.powi(n as i32);
    let mult: Vec<f64> = (1..=n).map(|w| binom(n, w) * 3f64.powi(w as i32)).collect();
    let mut memo: Vec<Option<f64>> = vec![None; 1 << (2 * n)];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut per_weight = vec![0.0; n];
    for _ in 0..n_samples {
        let t = random_twirl(n, rng);
        let mut x = 1.0;
        for w in 1..=n {
            let q = t.conjugate(&PauliString::z_prefix(n, w)).unsigned();
            let idx = q.index();
            let exact = match memo[idx] {
                Some(v) => v,
                None => {
                    let v = lambda(&q)?;
                    memo[idx] = Some(v);
                    v
                }
            };
            let l = match opts.shots {
                Some(shots) if shots > 0 => {
                    let p = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
                    let ups = Binomial::new(shots, p).map_err(|e| invalid(e.to_string()))?.sample(rng);
                    2.0 * ups as f64 / shots as f64 - 1.0
                }
                _ => exact,
            };
            per_weight[w - 1] += l;
            x += mult[w - 1] * l;
        }
        x /= dd;
        sum += x;
        sum_sq += x * x;
    }
    let m = n_samples as f64;
    let mean = sum / m;
    let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
    let d = (1usize << n) as f64;
    Ok(TwirlEstimate {
        pr0_hat: mean,
        n_samples,
        delta,
        fbar: (d * mean + 1.0) / (d + 1.0),
        stderr: (var / m).sqrt(),
        per_weight_mean: per_weight.into_iter().map(|s| s / m).collect(),
    })
}

/// Estimates the no-error probability of a memory channel.
pub fn twirl_estimate_memory<R: Rng + ?Sized>(noise: &Channel, delta: f64, rng: &mut R) -> Result<TwirlEstimate> {
    twirl_estimate_memory_with(noise, delta, TwirlOptions::default(), rng)
}

pub fn twirl_estimate_memory_with<R: Rng + ?Sized>(
    noise: &Channel,
    delta: f64,
    opts: TwirlOptions,
    rng: &mut R,
) -> Result<TwirlEstimate> {
    noise.check_trace_preserving(1e-10)?;
    run(noise.n(), delta, opts, rng, |q| noise.pauli_fidelity(q))
}

/// Certifies an implementation `noisy_gate ≈ U` of a Clifford `U`, measuring
/// `U Q U†` after the gate; the estimate is that of the error `U† ∘ noisy_gate`.
pub fn certify_clifford<R: Rng + ?Sized>(
    noisy_gate: &Channel,
    target: &CliffordTableau,
    delta: f64,
    rng: &mut R,
) -> Result<TwirlEstimate> {
    certify_clifford_with(noisy_gate, target, delta, TwirlOptions::default(), rng)
}

pub fn certify_clifford_with<R: Rng + ?Sized>(
    noisy_gate: &Channel,
    target: &CliffordTableau,
    delta: f64,
    opts: TwirlOptions,
    rng: &mut R,
) -> Result<TwirlEstimate> {
    if noisy_gate.n() != target.n() {
        return Err(Error::DimensionMismatch { expected: target.n(), got: noisy_gate.n() });
    }
    noisy_gate.check_trace_preserving(1e-10)?;
    let d = noisy_gate.dim() as f64;
    run(target.n(), delta, opts, rng, |q| {
        let out = noisy_gate.apply_linear(&q.dense())?;
        let m = target.conjugate(q);
        let sign = m.sign().expect("images of Hermitian strings are Hermitian");
        Ok(sign * qop::pauli_expectation(&out, &m.unsigned()) / d)
    })
}

/// Pauli channel whose error strings of weight `w` carry total probability
/// `class_probs[w − 1]`, split by the product of per-letter weights `[X, Y, Z]`.
pub fn weight_class_pauli_channel(n: usize, class_probs: &[f64], letters: [f64; 3]) -> Result<Channel> {
    if class_probs.len() > n || class_probs.iter().any(|p| !(*p >= 0.0)) || letters.iter().any(|p| !(*p > 0.0)) {
        return Err(invalid("bad weight-class specification"));
    }
    let total: f64 = class_probs.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(invalid("class probabilities exceed one"));
    }
    let letter = |p: Pauli| match p {
        Pauli::X => letters[0],
        Pauli::Y => letters[1],
        Pauli::Z => letters[2],
        Pauli::I => 1.0,
    };
    let all = PauliString::all(n);
    let mut norm = vec![0.0; n + 1];
    for q in &all {
        norm[q.weight()] += q.word().iter().map(|&p| letter(p)).product::<f64>();
    }
    let terms = all
        .into_iter()
        .filter_map(|q| {
            let w = q.weight();
            if w == 0 {
                return Some((q, 1.0 - total));
            }
            let cp = *class_probs.get(w - 1)?;
            let share = q.word().iter().map(|&p| letter(p)).product::<f64>() / norm[w];
            (cp > 0.0).then_some((q, cp * share))
        })
        .collect();
    Channel::pauli(terms)
}

/// Three-qubit memory noise fixtures with no-error probability 0.44 or 0.84.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryFixture {
    Strong,
    Weak,
}

impl MemoryFixture {
    pub fn pr0(self) -> f64 {
        match self {
            MemoryFixture::Strong => 0.44,
            MemoryFixture::Weak => 0.84,
        }
    }

    pub fn channel(self) -> Channel {
        let classes: &[f64] = match self {
            MemoryFixture::Strong => &[0.30, 0.18, 0.08],
            MemoryFixture::Weak => &[0.10, 0.045, 0.015],
        };
        weight_class_pauli_channel(3, classes, [0.2, 0.2, 0.6]).expect("fixture is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::super::gates::{cnot_tableau, CliffordGate};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sample_rule_values() {
        assert_eq!(twirl_sample_count(3, 0.02), 48_080);
        assert!(twirl_sample_count(7, 0.05) > twirl_sample_count(3, 0.05));
    }

    #[test]
    fn fixtures_have_stated_pr0() {
        for f in [MemoryFixture::Strong, MemoryFixture::Weak] {
            assert!((f.channel().no_error_probability().unwrap() - f.pr0()).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_gives_one_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let est = twirl_estimate_memory_with(
            &Channel::identity(3),
            0.05,
            TwirlOptions { n_samples: Some(200), shots: None },
            &mut rng,
        )
        .unwrap();
        assert!((est.pr0_hat - 1.0).abs() < 1e-12 && est.stderr < 1e-12);
    }

    #[test]
    fn estimator_mean_is_exact_over_the_twirl_group() {
        // averaging λ over all weight-w strings reproduces Pr(0) exactly
        let ch = MemoryFixture::Strong.channel();
        let n = 3;
        let mut acc = 1.0;
        for w in 1..=n {
            let strings: Vec<_> = PauliString::all(n).into_iter().filter(|q| q.weight() == w).collect();
            let mean: f64 =
                strings.iter().map(|q| ch.pauli_fidelity(q).unwrap()).sum::<f64>() / strings.len() as f64;
            acc += binom(n, w) * 3f64.powi(w as i32) * mean;
        }
        assert!((acc / 64.0 - 0.44).abs() < 1e-12);
    }

    #[test]
    fn depolarized_cnot_certification() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = CliffordGate::Cnot(0, 1).dense(2).unwrap();
        let noisy = Channel::compose(vec![Channel::depolarizing(2, 0.1).unwrap(), Channel::unitary(u.clone()).unwrap()]).unwrap();
        let est = certify_clifford(&noisy, &cnot_tableau(2, 0, 1), 0.05, &mut rng).unwrap();
        let exact = qop::average_gate_fidelity_exact(&noisy, &u).unwrap();
        assert!((est.fbar - exact).abs() < 1e-12);
        let spread = est.per_weight_mean.iter().fold(0.0f64, |m, v| m.max((v - 0.9).abs()));
        assert!(spread < 1e-12);
    }

    #[test]
    fn wrong_target_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = CliffordGate::Cnot(0, 1).dense(2).unwrap();
        let est = certify_clifford(&Channel::unitary(u).unwrap(), &cnot_tableau(2, 1, 0), 0.05, &mut rng).unwrap();
        assert!(est.fbar < 0.9);
    }

    #[test]
    fn shot_noise_stays_unbiased() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ch = MemoryFixture::Weak.channel();
        let est = twirl_estimate_memory_with(&ch, 0.05, TwirlOptions { n_samples: Some(4000), shots: Some(500) }, &mut rng)
            .unwrap();
        assert!((est.pr0_hat - 0.84).abs() < 4.0 * est.stderr + 1e-3, "{est:?}");
    }
}
