// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! GRAPE: gradient ascent on piecewise-constant controls to maximize the
//! Hilbert–Schmidt gate fidelity.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pulse::{ControlPulse, DEFAULT_U_MAX};
use super::control_operators;
use crate::error::{invalid, Error, Result};
use crate::qop::{herm_eig, identity, r, trace_product, Mat, C64};
use crate::spin::{internal_hamiltonian, SpinSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMode {
    Exact,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    /// Steepest ascent; the step grows after every accepted move.
    GradientAscent,
    /// Limited-memory BFGS directions, same acceptance rule.
    Lbfgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrapeConfig {
    /// Initial line-search step, as the largest per-amplitude change in units of `u_max`.
    pub step_size: f64,
    pub max_iters: usize,
    pub target_fidelity: f64,
    pub gradient_mode: GradientMode,
    /// `(B1 scale, weight)` members of the robust objective.
    pub rf_distribution: Vec<(f64, f64)>,
    pub u_max: f64,
    pub optimizer: Optimizer,
}

impl Default for GrapeConfig {
    fn default() -> Self {
        GrapeConfig {
            step_size: 0.05,
            max_iters: 2000,
            target_fidelity: 0.99,
            gradient_mode: GradientMode::Exact,
            rf_distribution: vec![(1.0, 1.0)],
            u_max: DEFAULT_U_MAX,
            optimizer: Optimizer::Lbfgs,
        }
    }
}

impl GrapeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_fidelity > 0.0 && self.target_fidelity <= 1.0) {
            return Err(invalid("target fidelity must lie in (0, 1]"));
        }
        if !(self.step_size > 0.0) || !(self.u_max > 0.0) {
            return Err(invalid("step size and u_max must be positive"));
        }
        if self.rf_distribution.is_empty() {
            return Err(invalid("rf distribution is empty"));
        }
        let total: f64 = self.rf_distribution.iter().map(|x| x.1).sum();
        if (total - 1.0).abs() > 1e-9 || self.rf_distribution.iter().any(|x| !(x.1 >= 0.0) || !(x.0 > 0.0)) {
            return Err(invalid("rf distribution needs positive scales and weights summing to 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrapeStatus {
    Converged,
    MaxIterations,
    /// No improving step found by the line search.
    Stalled,
    /// Gradient norm below 1e-10 short of the target.
    GradientVanished,
}

impl GrapeStatus {
    pub fn is_converged(self) -> bool {
        self == GrapeStatus::Converged
    }
}

#[derive(Debug, Clone)]
pub struct GrapeOutcome {
    pub pulse: ControlPulse,
    /// Objective after every accepted iteration, starting with the initial pulse.
    pub trace: Vec<f64>,
    pub status: GrapeStatus,
    pub fidelity: f64,
    pub iterations: usize,
}

/// Everything the objective needs: drift, control Hamiltonians, target and
/// the robustness ensemble.
#[derive(Debug, Clone)]
pub struct GrapeProblem {
    h_int: Mat,
    control_ops: Vec<Mat>,
    target_dag: Mat,
    rf: Vec<(f64, f64)>,
    dt: f64,
}

struct StepEig {
    vals: Vec<f64>,
    vecs: Mat,
    u: Mat,
}

impl GrapeProblem {
    pub fn new(h_int: Mat, control_ops: Vec<Mat>, target: &Mat, rf: Vec<(f64, f64)>, dt: f64) -> Result<Self> {
        let d = h_int.nrows();
        if target.shape() != (d, d) || control_ops.iter().any(|h| h.shape() != (d, d)) {
            return Err(Error::DimensionMismatch { expected: d, got: target.nrows() });
        }
        if !(dt > 0.0) {
            return Err(invalid("dt must be positive"));
        }
        Ok(GrapeProblem { h_int, control_ops, target_dag: target.adjoint(), rf, dt })
    }

    /// Problem for a molecule with one x/y channel pair per species.
    pub fn for_system(sys: &SpinSystem, target: &Mat, cfg: &GrapeConfig, dt: f64) -> Result<Self> {
        let weak = sys.strongly_coupled_pairs().is_empty();
        let (_, ops) = control_operators(sys);
        Self::new(internal_hamiltonian(sys, weak), ops, target, cfg.rf_distribution.clone(), dt)
    }

    pub fn n_channels(&self) -> usize {
        self.control_ops.len()
    }

    fn dim(&self) -> usize {
        self.h_int.nrows()
    }

    fn step(&self, amps: &[f64], scale: f64) -> StepEig {
        let mut h = self.h_int.clone();
        for (u, op) in amps.iter().zip(&self.control_ops) {
            h += op * r(u * scale);
        }
        let (vals, vecs) = herm_eig(&h);
        let mut vd = vecs.clone();
        for (j, lam) in vals.iter().enumerate() {
            let ph = C64::from_polar(1.0, -lam * self.dt);
            for i in 0..vd.nrows() {
                vd[(i, j)] *= ph;
            }
        }
        let u = vd * vecs.adjoint();
        StepEig { vals, vecs, u }
    }

    fn total(&self, steps: &[Vec<f64>], scale: f64) -> Mat {
        steps.iter().fold(identity(self.dim()), |acc, a| self.step(a, scale).u * acc)
    }

    /// Robust objective `Σ_s w_s |Tr(U_th† U_s)|² / d²`.
    pub fn fidelity(&self, pulse: &ControlPulse) -> f64 {
        self.fidelity_steps(pulse.steps())
    }

    fn fidelity_steps(&self, steps: &[Vec<f64>]) -> f64 {
        let d2 = (self.dim() * self.dim()) as f64;
        self.rf
            .iter()
            .map(|&(s, w)| w * trace_product(&self.target_dag, &self.total(steps, s)).norm_sqr() / d2)
            .sum()
    }

    /// Objective and its exact derivative with respect to every `u_k(m)`.
    pub fn gradient(&self, pulse: &ControlPulse) -> (f64, Vec<Vec<f64>>) {
        self.gradient_steps(pulse.steps())
    }

    fn gradient_steps(&self, steps: &[Vec<f64>]) -> (f64, Vec<Vec<f64>>) {
        let n = steps.len();
        let k = self.n_channels();
        let d = self.dim();
        let d2 = (d * d) as f64;
        let mut grad = vec![vec![0.0; k]; n];
        let mut phi = 0.0;
        if n == 0 {
            let g = trace_product(&self.target_dag, &identity(d));
            return (g.norm_sqr() / d2, grad);
        }
        for &(scale, weight) in &self.rf {
            let eigs: Vec<StepEig> = steps.iter().map(|a| self.step(a, scale)).collect();
            // forward[m] = U_m ⋯ U_1 (forward[0] = I)
            let mut forward = Vec::with_capacity(n + 1);
            forward.push(identity(d));
            for e in &eigs {
                let next = &e.u * forward.last().unwrap();
                forward.push(next);
            }
            let g = trace_product(&self.target_dag, &forward[n]);
            phi += weight * g.norm_sqr() / d2;
            // back = U_N ⋯ U_{m+1}, built while walking m downwards
            let mut back = identity(d);
            for m in (0..n).rev() {
                let e = &eigs[m];
                let x = &forward[m] * &self.target_dag * &back;
                let xt = e.vecs.adjoint() * x * &e.vecs;
                let gamma = Mat::from_fn(d, d, |a, b| {
                    let mid = C64::from_polar(1.0, -0.5 * (e.vals[a] + e.vals[b]) * self.dt);
                    let half = 0.5 * (e.vals[a] - e.vals[b]) * self.dt;
                    let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
                    mid * sinc
                });
                for (ch, op) in self.control_ops.iter().enumerate() {
                    let et = e.vecs.adjoint() * op * &e.vecs;
                    // direction of the exponent: −i Δt s H_k
                    let scale_c = C64::new(0.0, -self.dt * scale);
                    let mut dg = C64::new(0.0, 0.0);
                    for a in 0..d {
                        for b in 0..d {
                            dg += xt[(b, a)] * gamma[(a, b)] * et[(a, b)];
                        }
                    }
                    dg *= scale_c;
                    grad[m][ch] += weight * 2.0 * (g.conj() * dg).re / d2;
                }
                back *= &e.u;
            }
        }
        (phi, grad)
    }

    /// Central finite differences with step `h_rel · u_scale`.
    pub fn gradient_fd(&self, pulse: &ControlPulse, h_rel: f64, u_scale: f64) -> Vec<Vec<f64>> {
        let mut steps = pulse.steps().to_vec();
        let h = h_rel * u_scale;
        let mut grad = vec![vec![0.0; self.n_channels()]; steps.len()];
        for m in 0..steps.len() {
            for k in 0..self.n_channels() {
                let orig = steps[m][k];
                steps[m][k] = orig + h;
                let fp = self.fidelity_steps(&steps);
                steps[m][k] = orig - h;
                let fm = self.fidelity_steps(&steps);
                steps[m][k] = orig;
                grad[m][k] = (fp - fm) / (2.0 * h);
            }
        }
        grad
    }
}

/// Exact gradient of the robust objective for `pulse`.
pub fn grape_gradient(problem: &GrapeProblem, pulse: &ControlPulse) -> (f64, Vec<Vec<f64>>) {
    problem.gradient(pulse)
}

/// Seeded starting guess, uniform in ±1% of `u_max`.
pub fn initial_guess(sys: &SpinSystem, n_steps: usize, dt: f64, u_max: f64, seed: u64) -> Result<ControlPulse> {
    let (names, _) = control_operators(sys);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ControlPulse::random(dt, names, n_steps, u_max, 0.01, &mut rng)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn flatten(v: &[Vec<f64>]) -> Vec<f64> {
    v.iter().flatten().copied().collect()
}

fn unflatten(v: &[f64], k: usize) -> Vec<Vec<f64>> {
    v.chunks(k.max(1)).map(|c| c.to_vec()).collect()
}

/// L-BFGS two-loop recursion for ascent (`grad` is the ascent gradient).
fn lbfgs_direction(grad: &[f64], hist: &VecDeque<(Vec<f64>, Vec<f64>)>) -> Vec<f64> {
    // minimise −f: q = −grad, pairs (s, y) with y = ∇(−f)_new − ∇(−f)_old
    let mut q: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut alphas = Vec::with_capacity(hist.len());
    for (s, y) in hist.iter().rev() {
        let rho = 1.0 / dot(y, s);
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push((a, rho));
    }
    if let Some((s, y)) = hist.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for ((s, y), (a, rho)) in hist.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += si * (a - b));
    }
    // descent direction for −f is −q; ascent direction for f is −q as well
    q.iter().map(|v| -v).collect()
}

/// Optimizes `init` towards `u_target` on `sys`.
///
/// Only improving steps are accepted, so the returned trace is
/// nondecreasing. A run that stops below `target_fidelity` reports a
/// non-converged status together with the best pulse found.
pub fn grape_optimize(sys: &SpinSystem, u_target: &Mat, init: &ControlPulse, cfg: &GrapeConfig) -> Result<GrapeOutcome> {
    cfg.validate()?;
    let problem = GrapeProblem::for_system(sys, u_target, cfg, init.dt())?;
    if init.n_channels() != problem.n_channels() {
        return Err(Error::DimensionMismatch { expected: problem.n_channels(), got: init.n_channels() });
    }
    optimize_problem(&problem, init, cfg)
}

/// Optimizer loop on an explicit problem.
pub fn optimize_problem(problem: &GrapeProblem, init: &ControlPulse, cfg: &GrapeConfig) -> Result<GrapeOutcome> {
    cfg.validate()?;
    let k = init.n_channels();
    let umax = cfg.u_max;
    let clip = |v: f64| v.clamp(-1.0, 1.0);
    // normalized variables x = u / u_max
    let mut x: Vec<f64> = flatten(init.steps()).into_iter().map(|u| clip(u / umax)).collect();
    let to_steps = |x: &[f64]| unflatten(&x.iter().map(|v| v * umax).collect::<Vec<_>>(), k);
    let eval_grad = |x: &[f64]| -> (f64, Vec<f64>) {
        let steps = to_steps(x);
        let (f, g) = match cfg.gradient_mode {
            GradientMode::Exact => problem.gradient_steps(&steps),
            GradientMode::FiniteDifference => {
                let p = ControlPulse::new(init.dt(), init.channels().to_vec(), steps.clone()).expect("valid pulse");
                (problem.fidelity_steps(&steps), problem.gradient_fd(&p, 1e-6, umax))
            }
        };
        (f, flatten(&g).into_iter().map(|v| v * umax).collect())
    };
    let (mut f, mut g) = eval_grad(&x);
    let mut trace = vec![f];
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::new();
    let mut alpha = cfg.step_size;
    let mut status = GrapeStatus::MaxIterations;
    let mut iterations = 0;
    for _ in 0..cfg.max_iters {
        if f >= cfg.target_fidelity {
            status = GrapeStatus::Converged;
            break;
        }
        let gnorm = dot(&g, &g).sqrt();
        if gnorm < 1e-10 {
            status = GrapeStatus::GradientVanished;
            break;
        }
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let (dir, mut step) = match cfg.optimizer {
            Optimizer::Lbfgs if !hist.is_empty() => {
                let d = lbfgs_direction(&g, &hist);
                if dot(&d, &g) > 0.0 {
                    (d, 1.0)
                } else {
                    hist.clear();
                    (g.iter().map(|v| v / gmax).collect(), alpha)
                }
            }
            _ => (g.iter().map(|v| v / gmax).collect(), alpha),
        };
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| clip(xi + step * di)).collect();
            let ft = problem.fidelity_steps(&to_steps(&trial));
            if ft > f {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, _)) = accepted else {
            status = GrapeStatus::Stalled;
            break;
        };
        let (f_new, g_new) = eval_grad(&x_new);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g.iter().zip(&g_new).map(|(a, b)| a - b).collect();
        if dot(&s, &y) > 1e-14 {
            hist.push_back((s, y));
            if hist.len() > 12 {
                hist.pop_front();
            }
        }
        if cfg.optimizer == Optimizer::GradientAscent || hist.is_empty() {
            alpha = (step * 2.0).min(1.0);
        }
        x = x_new;
        f = f_new;
        g = g_new;
        trace.push(f);
        iterations += 1;
    }
    if status == GrapeStatus::MaxIterations && f >= cfg.target_fidelity {
        status = GrapeStatus::Converged;
    }
    let pulse = ControlPulse::new(init.dt(), init.channels().to_vec(), to_steps(&x))?;
    Ok(GrapeOutcome { pulse, trace, status, fidelity: f, iterations })
}

/// Largest deviation between two gradients relative to the larger's max-norm.
pub fn gradient_relative_error(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let fa = flatten(a);
    let fb = flatten(b);
    let scale = fa.iter().chain(&fb).fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    fa.iter().zip(&fb).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{cnot_matrix, rotation_1q, Axis};
    use crate::qop::pauli::Pauli;
    use rand::SeedableRng;

    fn single_spin() -> SpinSystem {
        SpinSystem::homonuclear(vec![0.0], vec![vec![0.0]]).unwrap()
    }

    #[test]
    fn identity_target_is_immediate() {
        let sys = single_spin();
        let init = ControlPulse::zeros(1e-5, vec!["1H:x".into(), "1H:y".into()], 10).unwrap();
        let out = grape_optimize(&sys, &identity(2), &init, &GrapeConfig::default()).unwrap();
        assert_eq!(out.status, GrapeStatus::Converged);
        assert_eq!(out.iterations, 0);
        assert!((out.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_pulse_has_empty_gradient() {
        let p = GrapeProblem::new(Mat::zeros(2, 2), vec![], &identity(2), vec![(1.0, 1.0)], 1e-5).unwrap();
        let pulse = ControlPulse::zeros(1e-5, vec![], 0).unwrap();
        let (f, g) = p.gradient(&pulse);
        assert!(g.is_empty());
        assert!((f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sys = crate::spin::Preset::Chloroform.load();
        let cfg = GrapeConfig { rf_distribution: vec![(0.95, 0.3), (1.0, 0.4), (1.05, 0.3)], ..Default::default() };
        let target = cnot_matrix(0, 1, 2);
        let problem = GrapeProblem::for_system(&sys, &target, &cfg, 2e-5).unwrap();
        let names = control_operators(&sys).0;
        for _ in 0..3 {
            let pulse = ControlPulse::random(2e-5, names.clone(), 12, DEFAULT_U_MAX, 0.3, &mut rng).unwrap();
            let (_, exact) = problem.gradient(&pulse);
            let fd = problem.gradient_fd(&pulse, 1e-6, DEFAULT_U_MAX);
            assert!(gradient_relative_error(&exact, &fd) < 1e-6);
        }
    }

    #[test]
    fn stationary_at_perfect_fidelity() {
        let sys = single_spin();
        let dt = 1e-5;
        let n = 10;
        let u = std::f64::consts::PI / (n as f64 * dt);
        let pulse = ControlPulse::new(dt, vec!["1H:x".into(), "1H:y".into()], vec![vec![u, 0.0]; n]).unwrap();
        let target = rotation_1q(Axis::X, std::f64::consts::PI).unwrap();
        let problem = GrapeProblem::for_system(&sys, &target, &GrapeConfig::default(), dt).unwrap();
        let (f, g) = problem.gradient(&pulse);
        assert!((f - 1.0).abs() < 1e-12);
        let norm: f64 = flatten(&g).iter().map(|v| v * v).sum::<f64>().sqrt() * DEFAULT_U_MAX;
        assert!(norm < 1e-8, "{norm}");
    }

    #[test]
    fn single_spin_not_gate() {
        let sys = single_spin();
        let init = initial_guess(&sys, 100, 1e-5, DEFAULT_U_MAX, 3).unwrap();
        let target = Pauli::X.matrix();
        for optimizer in [Optimizer::Lbfgs, Optimizer::GradientAscent] {
            let cfg = GrapeConfig { target_fidelity: 0.9999, optimizer, ..Default::default() };
            let out = grape_optimize(&sys, &target, &init, &cfg).unwrap();
            assert!(out.status.is_converged(), "{optimizer:?}: {:?} {}", out.status, out.fidelity);
            assert!(out.fidelity >= 0.9999);
            assert!(out.trace.windows(2).all(|w| w[1] >= w[0]));
            assert!(out.pulse.max_abs() <= DEFAULT_U_MAX);
        }
    }

    #[test]
    fn stall_reports_not_converged() {
        // no controls at all: nothing can move the fidelity
        let p = GrapeProblem::new(Mat::zeros(2, 2), vec![Mat::zeros(2, 2)], &Pauli::X.matrix(), vec![(1.0, 1.0)], 1e-5)
            .unwrap();
        let init = ControlPulse::zeros(1e-5, vec!["dead".into()], 5).unwrap();
        let out = optimize_problem(&p, &init, &GrapeConfig::default()).unwrap();
        assert!(!out.status.is_converged());
        assert_eq!(out.trace.len(), 1);
    }

    #[test]
    fn config_validation() {
        let bad = GrapeConfig { rf_distribution: vec![(1.0, 0.5)], ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = GrapeConfig { target_fidelity: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
