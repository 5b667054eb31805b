// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::config::*;
use super::{fmt_f64 as f, parse_config, sha256_hex, HarnessError, Output, Table};
use crate::clifford::{
    self, certify_clifford_with, randomized_benchmarking, twirl_estimate_memory_with, CliffordGate, MemoryFixture,
    TwirlOptions,
};
use crate::control::{cnot_matrix, grape_optimize, grape::initial_guess, rotation, Axis};
use crate::experiments::{self as ex, ContextMethod, Dqc1Instance, Dqc1Mode};
use crate::noise::Channel;
use crate::qec::{self, distill, transversal, LogicalGate, StabilizerCode};
use crate::qop::{self, C64};
use crate::spin::{self, Preset, SpinSystem};

type Res = Result<Output, HarnessError>;

pub(crate) fn dispatch(name: &str, text: Option<&str>, base: &Path, seed: u64, shots: Option<u64>) -> Res {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match name {
        "grape" => grape(parse_config(text)?, base, seed),
        "twirl" => twirl(parse_config(text)?, shots, &mut rng),
        "certify" => certify(parse_config(text)?, shots, &mut rng),
        "rb" => rb(parse_config(text)?, &mut rng),
        "qec" => qec_run(parse_config(text)?),
        "distill" => distill_run(parse_config(text)?),
        "dqc1" => dqc1(parse_config(text)?, shots, &mut rng),
        "contextuality" => contextuality(parse_config(text)?, &mut rng),
        "weak" => weak(parse_config(text)?),
        "ising" => ising(parse_config(text)?),
        "xxz" => xxz(parse_config(text)?, seed),
        "transfer" => transfer(parse_config(text)?),
        "spectrum" => spectrum(parse_config(text)?, base),
        other => Err(HarnessError::UnknownExperiment(other.to_string())),
    }
}

fn bad(msg: impl Into<String>) -> HarnessError {
    HarnessError::BadConfig(msg.into())
}

/// Loads a molecule and records the hash of its source.
fn molecule(
    preset: &str,
    path: Option<&Path>,
    base: &Path,
    fixtures: &mut BTreeMap<String, String>,
) -> Result<SpinSystem, HarnessError> {
    match path {
        Some(p) => {
            let p = if p.is_relative() { base.join(p) } else { p.to_path_buf() };
            let text = fs::read_to_string(&p).map_err(|e| bad(format!("{}: {e}", p.display())))?;
            fixtures.insert(format!("molecule:{}", p.display()), sha256_hex(text.as_bytes()));
            SpinSystem::from_json(&text).map_err(|e| bad(e.to_string()))
        }
        None => {
            let pr = Preset::from_name(preset).ok_or_else(|| bad(format!("unknown molecule preset '{preset}'")))?;
            fixtures.insert(format!("molecule:{preset}"), sha256_hex(pr.json().as_bytes()));
            Ok(pr.load())
        }
    }
}

fn grape(cfg: GrapeRun, base: &Path, seed: u64) -> Res {
    let mut fixtures = BTreeMap::new();
    let sys = molecule(&cfg.molecule, cfg.molecule_path.as_deref(), base, &mut fixtures)?;
    if cfg.control == cfg.target || cfg.control >= sys.n() || cfg.target >= sys.n() {
        return Err(bad("control and target must be distinct spins of the molecule"));
    }
    cfg.grape.validate().map_err(|e| bad(e.to_string()))?;
    let init = initial_guess(&sys, cfg.n_steps, cfg.dt, cfg.grape.u_max, cfg.init_seed.unwrap_or(seed))?;
    let target = cnot_matrix(cfg.control, cfg.target, sys.n());
    let out = grape_optimize(&sys, &target, &init, &cfg.grape)?;
    let mut t = Table::new(&["iteration", "fidelity"]);
    for (i, v) in out.trace.iter().enumerate() {
        t.push(vec![i.to_string(), f(*v)]);
    }
    let mut o = Output::new(
        t,
        json!({ "fidelity": out.fidelity, "iterations": out.iterations, "status": out.status, "duration_s": out.pulse.duration() }),
    );
    o.fixtures = fixtures;
    o.extra.push(("grape_pulse.json".into(), out.pulse.to_json()));
    if !out.status.is_converged() {
        o.deferred = Some(HarnessError::NotConverged {
            fidelity: out.fidelity,
            iterations: out.iterations,
            status: format!("{:?}", out.status),
        });
    }
    Ok(o)
}

fn twirl(cfg: TwirlRun, shots: Option<u64>, rng: &mut ChaCha8Rng) -> Res {
    if cfg.repeats == 0 {
        return Err(bad("repeats must be positive"));
    }
    let opts = TwirlOptions { n_samples: cfg.n_samples, shots };
    let mut t = Table::new(&["fixture", "repeat", "pr0_exact", "pr0_hat", "stderr", "n_samples", "fbar_exact", "fbar_hat", "within_delta"]);
    for name in &cfg.fixtures {
        let fx = match name.as_str() {
            "strong" => MemoryFixture::Strong,
            "weak" => MemoryFixture::Weak,
            other => return Err(bad(format!("unknown twirl fixture '{other}'"))),
        };
        let ch = fx.channel();
        let exact = ch.no_error_probability().expect("Pauli channel");
        let fbar_exact = (8.0 * exact + 1.0) / 9.0;
        for k in 0..cfg.repeats {
            let e = twirl_estimate_memory_with(&ch, cfg.delta, opts, rng)?;
            let ok = (e.pr0_hat - exact).abs() < cfg.delta;
            t.push(vec![
                name.clone(),
                k.to_string(),
                f(exact),
                f(e.pr0_hat),
                f(e.stderr),
                e.n_samples.to_string(),
                f(fbar_exact),
                f(e.fbar),
                ok.to_string(),
            ]);
        }
    }
    Ok(Output::new(t, json!({ "delta": cfg.delta, "sample_count": clifford::twirl_sample_count(3, cfg.delta) })))
}

fn certify(cfg: CertifyRun, shots: Option<u64>, rng: &mut ChaCha8Rng) -> Res {
    let opts = TwirlOptions { n_samples: cfg.n_samples, shots };
    let u = cnot_matrix(0, 1, 2);
    let tab = CliffordGate::Cnot(0, 1).tableau(2)?;
    let mut t = Table::new(&["p", "fbar_exact", "fbar_hat", "pr0_hat", "stderr"]);
    for &p in &cfg.depolarizing {
        let noisy = Channel::compose(vec![Channel::unitary(u.clone())?, Channel::depolarizing(2, p)?])?;
        let exact = qop::average_gate_fidelity_exact(&noisy, &u)?;
        let e = certify_clifford_with(&noisy, &tab, cfg.delta, opts, rng)?;
        t.push(vec![f(p), f(exact), f(e.fbar), f(e.pr0_hat), f(e.stderr)]);
    }
    Ok(Output::new(t, json!({ "delta": cfg.delta })))
}

fn rb(cfg: RbRun, rng: &mut ChaCha8Rng) -> Res {
    let p = clifford::depolarizing_for_infidelity(cfg.n, cfg.infidelity);
    let noise = Channel::depolarizing(cfg.n, p).map_err(|e| bad(e.to_string()))?;
    let r = randomized_benchmarking(cfg.n, &noise, &cfg.lengths, cfg.sequences, rng)?;
    let mut t = Table::new(&["length", "survival", "fit"]);
    for (m, s) in r.lengths.iter().zip(&r.survival) {
        let model = r.fit.a * r.fit.p.powi(*m as i32) + r.fit.b;
        t.push(vec![m.to_string(), f(*s), f(model)]);
    }
    Ok(Output::new(t, json!({ "injected_r": cfg.infidelity, "fit": r.fit })))
}

fn qec_run(cfg: QecRun) -> Res {
    let gate = match cfg.gate.as_str() {
        "I" => LogicalGate::I,
        "X" => LogicalGate::X,
        "H" => LogicalGate::H,
        g => return Err(bad(format!("unknown logical gate '{g}'"))),
    };
    let mut t = Table::new(&["code", "error", "f_uncorrected", "f_corrected"]);
    let mut means = serde_json::Map::new();
    for name in &cfg.codes {
        let code = StabilizerCode::by_name(name).map_err(|e| bad(e.to_string()))?;
        let s = qec::logical_gate_ensemble(&code, gate)?;
        for row in &s.rows {
            t.push(vec![name.clone(), row.error.clone(), f(row.f_uncorrected), f(row.f_corrected)]);
        }
        means.insert(name.clone(), json!({ "uncorrected": s.mean_uncorrected, "corrected": s.mean_corrected }));
    }
    let x0 = crate::qop::pauli::PauliString::single(6, 0, crate::qop::pauli::Pauli::X);
    let bad_cnot = transversal::transversal_cnot_demo(transversal::CnotVariant::Bad, Some(&x0))?;
    let good = transversal::transversal_cnot_demo(transversal::CnotVariant::Transversal, Some(&x0))?;
    Ok(Output::new(t, json!({ "means": means, "cnot_bad": bad_cnot, "cnot_transversal": good })))
}

fn distill_run(cfg: DistillRun) -> Res {
    if cfg.rounds == 0 {
        return Err(bad("rounds must be positive"));
    }
    let mut t = Table::new(&["p_in", "round", "p_out", "success_probability"]);
    for &p in &cfg.p_in {
        for (k, r) in distill::distill_rounds(p, cfg.rounds).map_err(|e| bad(e.to_string()))?.iter().enumerate() {
            t.push(vec![f(p), (k + 1).to_string(), f(r.p_out), f(r.success_probability)]);
        }
    }
    let thr = distill::distillation_threshold(0.5, 0.9)?;
    Ok(Output::new(t, json!({ "threshold": thr })))
}

fn dqc1(cfg: Dqc1Run, shots: Option<u64>, rng: &mut ChaCha8Rng) -> Res {
    if !(1..=6).contains(&cfg.n) {
        return Err(bad("dqc1 needs 1..=6 target qubits"));
    }
    let mode = match shots {
        Some(s) => Dqc1Mode::Sampled { shots: s },
        None => Dqc1Mode::Exact,
    };
    let d = 1usize << cfg.n;
    let mut t = Table::new(&["instance", "trace_re", "trace_im", "est_re", "est_im", "stderr"]);
    for k in 0..cfg.instances {
        let u = qop::random_unitary(d, rng);
        let exact = u.trace() / qop::r(d as f64);
        let e = ex::dqc1_trace(&Dqc1Instance { u, epsilon: cfg.epsilon, mode }, rng).map_err(|e| bad(e.to_string()))?;
        t.push(vec![k.to_string(), f(exact.re), f(exact.im), f(e.re), f(e.im), f(e.stderr)]);
    }
    Ok(Output::new(t, json!({ "mode": mode, "epsilon": cfg.epsilon })))
}

fn contextuality(cfg: ContextualityRun, rng: &mut ChaCha8Rng) -> Res {
    let p = cfg.meter_noise.unwrap_or_else(ex::contextuality::calibrated_meter_noise);
    let noise = Channel::depolarizing(3, p).map_err(|e| bad(e.to_string()))?;
    let mut t = Table::new(&["state", "r1", "r2", "r3", "c1", "c2", "c3", "beta", "beta_noisy"]);
    for k in 0..cfg.states {
        let rho = if k == 0 { qop::maximally_mixed(2) } else { qop::random_density(4, rng) };
        let ideal = ex::contextuality_beta(&rho, None, ContextMethod::Meter)?;
        let noisy = ex::contextuality_beta(&rho, Some(&noise), ContextMethod::Meter)?;
        let mut row = vec![k.to_string()];
        row.extend(ideal.correlations.iter().map(|c| f(*c)));
        row.push(f(ideal.beta));
        row.push(f(noisy.beta));
        t.push(row);
    }
    Ok(Output::new(t, json!({ "meter_noise": p, "classical_bound": ex::classical_beta_max() })))
}

fn weak(cfg: WeakRun) -> Res {
    let theta = ex::weak::theta_for_weak_value(cfg.target).map_err(|e| bad(e.to_string()))?;
    let (psi, phi) = ex::weak::theta_states(theta);
    let mut t = Table::new(&["g", "re", "im", "analytic_re", "analytic_im", "success_probability"]);
    for &g in &cfg.couplings {
        let w = ex::weak_value(&psi, [0.0, 0.0, 1.0], &phi, g).map_err(|e| bad(e.to_string()))?;
        t.push(vec![f(g), f(w.re), f(w.im), f(w.analytic_re), f(w.analytic_im), f(w.success_probability)]);
    }
    Ok(Output::new(t, json!({ "theta": theta })))
}

fn ising(cfg: IsingRun) -> Res {
    if cfg.points < 2 || !(cfg.h_max > cfg.h_min) {
        return Err(bad("need at least two points on an increasing field range"));
    }
    let grid: Vec<f64> =
        (0..cfg.points).map(|k| cfg.h_min + (cfg.h_max - cfg.h_min) * k as f64 / (cfg.points - 1) as f64).collect();
    let r = ex::ising_ground(cfg.j, &grid).map_err(|e| bad(e.to_string()))?;
    let mut t = Table::new(&["h", "magnetization", "entropy_bits", "degeneracy"]);
    for p in &r.points {
        t.push(vec![f(p.h), f(p.magnetization), f(p.entropy_bits), p.degeneracy.to_string()]);
    }
    let steps = ex::magnetization_steps(cfg.j, cfg.h_min, cfg.h_max, cfg.points - 1, 1e-9);
    Ok(Output::new(t, json!({ "steps": steps })))
}

fn xxz(cfg: XxzRun, seed: u64) -> Res {
    if !(cfg.step > 0.0) || !(cfg.gamma_max >= cfg.gamma_min) {
        return Err(bad("need a positive step on an increasing gamma range"));
    }
    let k = ((cfg.gamma_max - cfg.gamma_min) / cfg.step).round() as usize;
    let mut pts = Vec::with_capacity(k + 1);
    let mut t = Table::new(&["gamma", "energy", "lambda2_max", "ge", "branch1", "branch2", "branch3"]);
    for i in 0..=k {
        let g = cfg.gamma_min + cfg.step * i as f64;
        let r = ex::xxz_ground_ge(cfg.n, g, cfg.restarts, seed.wrapping_add(i as u64)).map_err(|e| bad(e.to_string()))?;
        t.push(vec![f(g), f(r.energy), f(r.lambda2_max), f(r.ge), f(r.branches[0]), f(r.branches[1]), f(r.branches[2])]);
        pts.push(r);
    }
    let crossing = ex::xxz::branch_crossing(&pts);
    let jump = ex::xxz::largest_ge_jump(&pts);
    Ok(Output::new(t, json!({ "branch_crossing": crossing, "ge_jump": jump })))
}

fn transfer(cfg: TransferRun) -> Res {
    cfg.chain.validate().map_err(|e| bad(e.to_string()))?;
    let r = ex::state_transfer(
        &cfg.chain,
        cfg.source,
        C64::new(cfg.alpha[0], cfg.alpha[1]),
        C64::new(cfg.beta[0], cfg.beta[1]),
        cfg.iterations,
    )?;
    let mut t = Table::new(&["iteration", "fidelity", "sink_population"]);
    for (i, (fi, s)) in r.fidelity.iter().zip(&r.sink_population).enumerate() {
        t.push(vec![i.to_string(), f(*fi), f(*s)]);
    }
    let ent = if cfg.entangle && cfg.source < cfg.chain.n {
        let e = ex::entangle_ends(&cfg.chain, cfg.source, cfg.iterations)?;
        json!({ "fidelity": e.fidelity, "sweeps": e.sweep_fidelity.len() - 1 })
    } else {
        json!(null)
    };
    Ok(Output::new(t, json!({ "theta": r.theta, "excitation_drift": r.excitation_drift, "entangle_ends": ent })))
}

fn spectrum(cfg: SpectrumRun, base: &Path) -> Res {
    let mut fixtures = BTreeMap::new();
    let sys = molecule(&cfg.molecule, cfg.molecule_path.as_deref(), base, &mut fixtures)?;
    let rho = spin::thermal_state(&sys, cfg.beta).map_err(|e| bad(e.to_string()))?;
    let n = sys.n();
    let mut read = qop::identity(sys.dim());
    for q in 0..n {
        read = rotation(Axis::Y, std::f64::consts::FRAC_PI_2, q, n)? * read;
    }
    let rho = qop::conjugate(&rho, &read);
    let fid = spin::simulate_fid(&rho, &sys, cfg.duration, cfg.samples).map_err(|e| bad(e.to_string()))?;
    let (freqs, amps) = spin::spectrum(&fid, cfg.samples as f64 / cfg.duration);
    let mut t = Table::new(&["frequency_hz", "re", "im"]);
    for (x, a) in freqs.iter().zip(&amps) {
        t.push(vec![f(*x), f(a.re), f(a.im)]);
    }
    let mut o = Output::new(t, json!({ "spins": n }));
    o.fixtures = fixtures;
    Ok(o)
}
