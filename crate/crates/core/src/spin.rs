// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Molecule models, internal Hamiltonians, thermal and pseudo-pure states,
//! and FID / spectrum readout.

use std::f64::consts::PI;
use std::path::Path;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qop::pauli::{Pauli, PauliString};
use crate::qop::{self, c, herm_eig, identity, r, Mat, C64};

/// Ratio |J|/|Δν| above which a homonuclear pair is not weakly coupled.
pub const WEAK_COUPLING_RATIO: f64 = 0.1;

/// An n-spin molecule in the rotating frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    offsets: Vec<f64>,
    couplings: Vec<Vec<f64>>,
    t1: Vec<f64>,
    t2star: Vec<f64>,
    species: Vec<String>,
}

/// Couplings in a molecule file: upper-triangular list or full matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingSpec {
    Upper(Vec<f64>),
    Full(Vec<Vec<f64>>),
}

/// On-disk molecule description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoleculeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub n: usize,
    pub offsets_hz: Vec<f64>,
    pub j_hz: CouplingSpec,
    pub t1_s: Vec<f64>,
    pub t2star_s: Vec<f64>,
    pub species: Vec<String>,
}

/// Bundled molecule fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Chloroform,
    Malonic,
    Crotonic,
    Chain7,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Chloroform, Preset::Malonic, Preset::Crotonic, Preset::Chain7];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Chloroform => "chloroform",
            Preset::Malonic => "malonic",
            Preset::Crotonic => "crotonic",
            Preset::Chain7 => "chain7",
        }
    }

    pub fn json(self) -> &'static str {
        match self {
            Preset::Chloroform => include_str!("../fixtures/molecules/chloroform.json"),
            Preset::Malonic => include_str!("../fixtures/molecules/malonic.json"),
            Preset::Crotonic => include_str!("../fixtures/molecules/crotonic.json"),
            Preset::Chain7 => include_str!("../fixtures/molecules/chain7.json"),
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn load(self) -> SpinSystem {
        SpinSystem::from_json(self.json()).expect("bundled fixture is valid")
    }
}

impl SpinSystem {
    /// Validates and builds a system. `couplings` is the full symmetric matrix in Hz.
    pub fn new(
        offsets: Vec<f64>,
        couplings: Vec<Vec<f64>>,
        t1: Vec<f64>,
        t2star: Vec<f64>,
        species: Vec<String>,
    ) -> Result<SpinSystem> {
        let n = offsets.len();
        if n == 0 {
            return Err(invalid("spin system needs at least one spin"));
        }
        if couplings.len() != n || couplings.iter().any(|row| row.len() != n) {
            return Err(invalid(format!("coupling matrix must be {n}x{n}")));
        }
        for (name, v) in [("t1", &t1), ("t2star", &t2star)] {
            if v.len() != n {
                return Err(invalid(format!("{name} has {} entries, expected {n}", v.len())));
            }
        }
        if species.len() != n {
            return Err(invalid(format!("species has {} entries, expected {n}", species.len())));
        }
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            if couplings[i][i] != 0.0 {
                return Err(invalid(format!("J[{i}][{i}] must be zero")));
            }
            for j in 0..i {
                if couplings[i][j] != couplings[j][i] {
                    return Err(invalid(format!("asymmetric coupling J[{i}][{j}] != J[{j}][{i}]")));
                }
            }
            if !(t2star[i] > 0.0) || !(t1[i] >= t2star[i]) {
                return Err(Error::Unphysical(format!(
                    "spin {i}: need T1 >= T2* > 0 (T1 = {}, T2* = {})",
                    t1[i], t2star[i]
                )));
            }
        }
        if offsets.iter().chain(couplings.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(invalid("non-finite offset or coupling"));
        }
        Ok(SpinSystem { offsets, couplings, t1, t2star, species })
    }

    /// Homonuclear system with uniform relaxation, convenient for tests.
    pub fn homonuclear(offsets: Vec<f64>, couplings: Vec<Vec<f64>>) -> Result<SpinSystem> {
        let n = offsets.len();
        SpinSystem::new(offsets, couplings, vec![10.0; n], vec![1.0; n], vec!["1H".into(); n])
    }

    pub fn from_file_spec(f: MoleculeFile) -> Result<SpinSystem> {
        let n = f.n;
        if f.offsets_hz.len() != n {
            return Err(Error::Config(format!("offsets_hz has {} entries, expected {n}", f.offsets_hz.len())));
        }
        let couplings = match f.j_hz {
            CouplingSpec::Full(m) => m,
            CouplingSpec::Upper(v) => {
                if v.len() != n * (n - 1) / 2 {
                    return Err(Error::Config(format!(
                        "j_hz upper-triangular list has {} entries, expected {}",
                        v.len(),
                        n * (n - 1) / 2
                    )));
                }
                let mut m = vec![vec![0.0; n]; n];
                let mut it = v.into_iter();
                #[allow(clippy::needless_range_loop)]
                for i in 0..n {
                    for j in i + 1..n {
                        let x = it.next().unwrap();
                        m[i][j] = x;
                        m[j][i] = x;
                    }
                }
                m
            }
        };
        SpinSystem::new(f.offsets_hz, couplings, f.t1_s, f.t2star_s, f.species)
    }

    pub fn from_json(s: &str) -> Result<SpinSystem> {
        let f: MoleculeFile = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_file_spec(f)
    }

    pub fn from_path(path: &Path) -> Result<SpinSystem> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_file_spec(&self) -> MoleculeFile {
        let n = self.n();
        let upper = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| self.couplings[i][j]).collect();
        MoleculeFile {
            name: None,
            note: None,
            n,
            offsets_hz: self.offsets.clone(),
            j_hz: CouplingSpec::Upper(upper),
            t1_s: self.t1.clone(),
            t2star_s: self.t2star.clone(),
            species: self.species.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n()
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn j(&self, a: usize, b: usize) -> f64 {
        self.couplings[a][b]
    }

    pub fn couplings(&self) -> &[Vec<f64>] {
        &self.couplings
    }

    pub fn t1(&self) -> &[f64] {
        &self.t1
    }

    pub fn t2star(&self) -> &[f64] {
        &self.t2star
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    /// Species labels with member spins, in order of first appearance.
    pub fn species_groups(&self) -> Vec<(String, Vec<usize>)> {
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, s) in self.species.iter().enumerate() {
            match groups.iter_mut().find(|g| &g.0 == s) {
                Some(g) => g.1.push(i),
                None => groups.push((s.clone(), vec![i])),
            }
        }
        groups
    }

    /// Homonuclear pairs that violate the weak-coupling ratio test.
    pub fn strongly_coupled_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let jij = self.couplings[i][j];
                if jij == 0.0 || self.species[i] != self.species[j] {
                    continue;
                }
                let dnu = (self.offsets[i] - self.offsets[j]).abs();
                if dnu == 0.0 || jij.abs() / dnu >= WEAK_COUPLING_RATIO {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Nonzero couplings `(i, j, J)` with `i < j`.
    pub fn coupled_pairs(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.couplings[i][j] != 0.0)
            .map(|(i, j)| (i, j, self.couplings[i][j]))
            .collect()
    }
}

/// Spin operator `I_a = σ_a / 2` on qubit `q`.
pub fn spin_op(n: usize, q: usize, axis: Pauli) -> Mat {
    PauliString::single(n, q, axis).dense() * r(0.5)
}

/// `Σ_i I_a^i`
pub fn total_spin(n: usize, axis: Pauli) -> Mat {
    (0..n).fold(Mat::zeros(1 << n, 1 << n), |acc, q| acc + spin_op(n, q, axis))
}

/// Internal Hamiltonian in rad/s.
///
/// Weak coupling keeps only the `I_z I_z` part of each coupling; otherwise the
/// full isotropic `I·I` form is used. A pair failing the weak-coupling ratio
/// test only produces a warning.
pub fn internal_hamiltonian(sys: &SpinSystem, weak_coupling: bool) -> Mat {
    let n = sys.n();
    let d = sys.dim();
    if weak_coupling {
        for (i, j) in sys.strongly_coupled_pairs() {
            log::warn!("spins {i} and {j} fail the weak-coupling ratio test (|J|/|dnu| >= {WEAK_COUPLING_RATIO})");
        }
        // diagonal: −Σ πν_i z_i + Σ (π/2) J_ij z_i z_j with z = ±1
        let diag = (0..d).map(|k| {
            let z = |q: usize| if k >> qop::bit_of(q, n) & 1 == 0 { 1.0 } else { -1.0 };
            let mut e = 0.0;
            for i in 0..n {
                e -= PI * sys.offsets[i] * z(i);
                for j in i + 1..n {
                    e += 0.5 * PI * sys.couplings[i][j] * z(i) * z(j);
                }
            }
            r(e)
        });
        return Mat::from_diagonal(&nalgebra::DVector::from_iterator(d, diag));
    }
    let mut h = Mat::zeros(d, d);
    for i in 0..n {
        h -= spin_op(n, i, Pauli::Z) * r(2.0 * PI * sys.offsets[i]);
    }
    for (i, j, jij) in sys.coupled_pairs() {
        for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
            let mut w = vec![Pauli::I; n];
            w[i] = axis;
            w[j] = axis;
            h += PauliString::new(w).dense() * r(2.0 * PI * jij / 4.0);
        }
    }
    h
}

/// Zeeman thermal state `exp(β Σ I_z) / Z` with a single dimensionless β.
pub fn thermal_state(sys: &SpinSystem, beta_scaled: f64) -> Result<Mat> {
    if !(beta_scaled >= 0.0) {
        return Err(invalid("beta must be nonnegative"));
    }
    let n = sys.n();
    let d = sys.dim();
    // work relative to the largest weight so β → ∞ stays finite
    let mut w: Vec<f64> = (0..d)
        .map(|k| {
            let ups = n - (k.count_ones() as usize);
            let m = ups as f64 - n as f64 / 2.0; // Σ z_i / 2
            beta_scaled * (m - n as f64 / 2.0)
        })
        .map(f64::exp)
        .collect();
    let z: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= z);
    Ok(Mat::from_diagonal(&nalgebra::DVector::from_iterator(d, w.into_iter().map(r))))
}

/// `(1−ε)/2^n · I + ε |0…0⟩⟨0…0|`
pub fn make_pps(n: usize, epsilon: f64) -> Result<Mat> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(invalid(format!("polarization {epsilon} outside (0, 1]")));
    }
    let d = 1usize << n;
    let mut m = identity(d) * r((1.0 - epsilon) / d as f64);
    m[(0, 0)] += r(epsilon);
    Ok(m)
}

/// Time-domain signal `Σ_i Tr(ρ(t) I_-^i) e^{−t/T2*_i}` sampled at
/// `t_k = k · duration / n_samples`.
///
/// The lowering operator is used so a spin with offset `ν > 0` appears at
/// `+ν` in the spectrum.
pub fn simulate_fid(rho: &Mat, sys: &SpinSystem, duration: f64, n_samples: usize) -> Result<Vec<C64>> {
    if n_samples < 2 || !(duration > 0.0) {
        return Err(invalid("need at least two samples and a positive duration"));
    }
    if rho.nrows() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), got: rho.nrows() });
    }
    let n = sys.n();
    let d = sys.dim();
    let weak = sys.strongly_coupled_pairs().is_empty();
    let h = internal_hamiltonian(sys, weak);
    let (energies, v) = herm_eig(&h);
    let rho_e = v.adjoint() * rho * &v;
    let dt = duration / n_samples as f64;
    let mut signal = vec![C64::new(0.0, 0.0); n_samples];
    for q in 0..n {
        let lower = spin_op(n, q, Pauli::X) - spin_op(n, q, Pauli::Y) * c(0.0, 1.0);
        let obs_e = v.adjoint() * lower * &v;
        // collect nonzero (rate, amplitude) pairs once
        let mut terms = Vec::new();
        for a in 0..d {
            for b in 0..d {
                let amp = rho_e[(a, b)] * obs_e[(b, a)];
                if amp.norm() > 1e-15 {
                    terms.push((energies[a] - energies[b], amp));
                }
            }
        }
        let t2 = sys.t2star[q];
        for (k, s) in signal.iter_mut().enumerate() {
            let t = k as f64 * dt;
            let env = (-t / t2).exp();
            let acc: C64 = terms.iter().map(|(w, amp)| amp * C64::from_polar(1.0, -w * t)).sum();
            *s += acc * env;
        }
    }
    Ok(signal)
}

/// Unitary DFT (`1/√N`) with an ascending, zero-centred frequency axis in Hz.
pub fn spectrum(fid: &[C64], sample_rate: f64) -> (Vec<f64>, Vec<C64>) {
    let n = fid.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut buf = fid.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 1.0 / (n as f64).sqrt();
    let shift = n / 2;
    let mut freqs = Vec::with_capacity(n);
    let mut amps = Vec::with_capacity(n);
    for i in 0..n {
        let k = (i + n - shift) % n;
        let signed = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
        freqs.push(signed * sample_rate / n as f64);
        amps.push(buf[k] * norm);
    }
    (freqs, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qop::pauli::ps;
    use crate::qop::{basis, max_abs_diff, maximally_mixed, projector, random_density, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_spin(j: f64) -> SpinSystem {
        SpinSystem::homonuclear(vec![0.0, 0.0], vec![vec![0.0, j], vec![j, 0.0]]).unwrap()
    }

    #[test]
    fn presets_load() {
        for p in Preset::ALL {
            let s = p.load();
            assert!(s.n() >= 2);
            assert!(s.strongly_coupled_pairs().is_empty(), "{}", p.name());
        }
        assert_eq!(Preset::Chloroform.load().species_groups().len(), 2);
    }

    #[test]
    fn json_rejects_asymmetric_couplings() {
        let bad = r#"{"n":2,"offsets_hz":[0,0],"j_hz":[[0,5],[4,0]],"t1_s":[1,1],"t2star_s":[0.5,0.5],"species":["1H","1H"]}"#;
        assert!(SpinSystem::from_json(bad).is_err());
        let good = bad.replace("[4,0]", "[5,0]");
        assert_eq!(SpinSystem::from_json(&good).unwrap().j(0, 1), 5.0);
        let wrong_len = r#"{"n":3,"offsets_hz":[0,0,0],"j_hz":[1,2],"t1_s":[1,1,1],"t2star_s":[0.5,0.5,0.5],"species":["a","a","a"]}"#;
        assert!(SpinSystem::from_json(wrong_len).is_err());
        let s = Preset::Crotonic.load();
        let back = SpinSystem::from_file_spec(s.to_file_spec()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn unphysical_relaxation_rejected() {
        let e = SpinSystem::new(vec![0.0], vec![vec![0.0]], vec![0.1], vec![0.2], vec!["1H".into()]);
        assert!(e.is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        let one = SpinSystem::homonuclear(vec![0.0], vec![vec![0.0]]).unwrap();
        assert_eq!(internal_hamiltonian(&one, true), Mat::zeros(2, 2));
        let h = internal_hamiltonian(&two_spin(5.0), true);
        let q = 2.0 * PI * 5.0 / 4.0;
        let expect = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![r(q), r(-q), r(-q), r(q)]));
        assert!(max_abs_diff(&h, &expect) < 1e-12);
        // full form shares the ZZ part; remainder is the flip-flop term
        let full = internal_hamiltonian(&two_spin(5.0), false);
        let flip = (ps("XX").dense() + ps("YY").dense()) * r(2.0 * PI * 5.0 / 4.0);
        assert!(max_abs_diff(&(full - flip), &h) < 1e-12);
    }

    #[test]
    fn weak_hamiltonian_commutes_with_z() {
        let s = Preset::Crotonic.load();
        let h = internal_hamiltonian(&s, true);
        for q in 0..4 {
            let z = PauliString::single(4, q, Pauli::Z).dense();
            assert_eq!(crate::qop::max_abs(&(&h * &z - &z * &h)), 0.0);
        }
        // dense oracle from Kronecker products
        let mut oracle = Mat::zeros(16, 16);
        for i in 0..4 {
            oracle -= spin_op(4, i, Pauli::Z) * r(2.0 * PI * s.offsets()[i]);
            for j in i + 1..4 {
                oracle += spin_op(4, i, Pauli::Z) * spin_op(4, j, Pauli::Z) * r(2.0 * PI * s.j(i, j));
            }
        }
        assert!(max_abs_diff(&h, &oracle) < 1e-9);
    }

    #[test]
    fn thermal_state_limits() {
        let s = Preset::Malonic.load();
        assert!(max_abs_diff(&thermal_state(&s, 0.0).unwrap(), &maximally_mixed(3)) < 1e-15);
        let one = SpinSystem::homonuclear(vec![10.0], vec![vec![0.0]]).unwrap();
        let cold = thermal_state(&one, 1e4).unwrap();
        assert!(max_abs_diff(&cold, &projector(&basis(2, 0))) < 1e-12);
        let beta = 1e-5;
        let rho = thermal_state(&s, beta).unwrap();
        let first_order = (identity(8) + total_spin(3, Pauli::Z) * r(beta)) / r(8.0);
        assert!(max_abs_diff(&rho, &first_order) < 1e-10);
    }

    #[test]
    fn pps_examples() {
        assert_eq!(make_pps(1, 1.0).unwrap(), projector(&basis(2, 0)));
        assert!(make_pps(1, 0.0).is_err());
        let eps = 1e-5;
        let rho = make_pps(2, eps).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        let (vals, _) = herm_eig(&rho);
        let lo = (1.0 - eps) / 4.0;
        for v in &vals[..3] {
            assert!((v - lo).abs() < 1e-15);
        }
        assert!((vals[3] - (lo + eps)).abs() < 1e-15);
        let z1 = PauliString::single(2, 0, Pauli::Z);
        assert!((crate::qop::pauli_expectation(&rho, &z1) - eps).abs() < 1e-15);
    }

    #[test]
    fn identity_part_is_invariant() {
        let mut g = ChaCha8Rng::seed_from_u64(4);
        let eps = 0.03;
        let sigma = random_density(8, &mut g);
        let rho = identity(8) * r((1.0 - eps) / 8.0) + &sigma * r(eps);
        let u = random_unitary(8, &mut g);
        let out = &u * &rho * u.adjoint();
        let deviation = out - identity(8) * r((1.0 - eps) / 8.0);
        assert!(max_abs_diff(&deviation, &(&u * &sigma * u.adjoint() * r(eps))) < 1e-14);
    }

    #[test]
    fn fid_of_mixed_state_is_zero() {
        for p in [Preset::Chloroform, Preset::Malonic] {
            let s = p.load();
            let fid = simulate_fid(&maximally_mixed(s.n()), &s, 0.1, 64).unwrap();
            assert!(fid.iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn single_spin_precession() {
        let s = SpinSystem::new(vec![100.0], vec![vec![0.0]], vec![2.0], vec![0.05], vec!["1H".into()]).unwrap();
        let rho = (identity(2) + Pauli::X.matrix()) * r(0.5);
        let n = 400;
        let dur = 0.2;
        let fid = simulate_fid(&rho, &s, dur, n).unwrap();
        for (k, z) in fid.iter().enumerate() {
            let t = k as f64 * dur / n as f64;
            let expect = C64::from_polar(0.5 * (-t / 0.05).exp(), 2.0 * PI * 100.0 * t);
            assert!((z - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn spectrum_basics() {
        let (_, zero) = spectrum(&vec![C64::new(0.0, 0.0); 16], 100.0);
        assert!(zero.iter().all(|z| z.norm() == 0.0));
        let n = 128;
        let rate = 128.0;
        let f = 20.0;
        let sig: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, 2.0 * PI * f * k as f64 / rate)).collect();
        let (freqs, amps) = spectrum(&sig, rate);
        let peak = (0..n).max_by(|&a, &b| amps[a].norm().partial_cmp(&amps[b].norm()).unwrap()).unwrap();
        assert!((freqs[peak] - f).abs() < 1e-12);
        let e_t: f64 = sig.iter().map(|z| z.norm_sqr()).sum();
        let e_f: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        assert!((e_t - e_f).abs() / e_t < 1e-9);
        let (odd, _) = spectrum(&sig[..5], 5.0);
        assert_eq!(odd, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn doublet_peaks_at_eigenvalue_differences() {
        let (nu, j) = (150.0, 12.0);
        let s = SpinSystem::new(
            vec![nu, -300.0],
            vec![vec![0.0, j], vec![j, 0.0]],
            vec![5.0, 5.0],
            vec![1.0, 1.0],
            vec!["1H".into(), "13C".into()],
        )
        .unwrap();
        // spin 0 transverse, spin 1 unpolarized
        let rho = crate::qop::tensor(&((identity(2) + Pauli::X.matrix()) * r(0.5)), &(identity(2) * r(0.5)));
        let n = 2048;
        let rate = 2048.0;
        let fid = simulate_fid(&rho, &s, n as f64 / rate, n).unwrap();
        let (freqs, amps) = spectrum(&fid, rate);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| amps[b].norm().partial_cmp(&amps[a].norm()).unwrap());
        let mut peaks = [freqs[idx[0]], freqs[idx[1]]];
        peaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // line positions from the Hamiltonian: spin-0 flips with spin 1 fixed
        let h = internal_hamiltonian(&s, true);
        let e = |k: usize| h[(k, k)].re / (2.0 * PI);
        let mut lines = vec![e(0b10) - e(0b00), e(0b11) - e(0b01)];
        lines.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let bin = rate / n as f64;
        for (p, l) in peaks.iter().zip(&lines) {
            assert!((p - l).abs() <= bin, "{p} vs {l}");
        }
        assert!((lines[0] - (nu - j / 2.0)).abs() < 1e-9);
        assert!((lines[1] - (nu + j / 2.0)).abs() < 1e-9);
    }
}
