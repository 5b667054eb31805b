// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! RF control: rotations, J-coupling gates, refocusing, GRAPE, pulse fixing
//! and RF selection.

pub mod fixing;
pub mod grape;
pub mod pulse;
pub mod rf;

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, Error, Result};
use crate::qop::pauli::{Pauli, PauliString};
use crate::qop::{self, c, embed, expm_hermitian, identity, r, Mat, C64};
use crate::spin::{internal_hamiltonian, spin_op, SpinSystem};

pub use fixing::{pulse_fix, DistortionModel, PulseFixReport};
pub use grape::{grape_gradient, grape_optimize, GradientMode, GrapeConfig, GrapeOutcome, GrapeProblem, GrapeStatus};
pub use pulse::{ControlPulse, DEFAULT_U_MAX};
pub use rf::{rf_selection_retention, B1Histogram};

/// Rotation axis for single-qubit pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    X,
    Y,
    Z,
    /// In-plane axis `(cos φ, −sin φ, 0)`, the rotation produced by an RF
    /// pulse of phase φ.
    Phase(f64),
    Vector([f64; 3]),
}

impl Axis {
    fn unit(self) -> Result<[f64; 3]> {
        Ok(match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
            Axis::Phase(phi) => [phi.cos(), -phi.sin(), 0.0],
            Axis::Vector(v) => {
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if !(n > 1e-12) {
                    return Err(invalid("rotation axis must be nonzero"));
                }
                [v[0] / n, v[1] / n, v[2] / n]
            }
        })
    }
}

/// `exp(−i θ n̂·σ/2)` as a 2×2 matrix.
pub fn rotation_1q(axis: Axis, angle: f64) -> Result<Mat> {
    if !angle.is_finite() {
        return Err(invalid("rotation angle must be finite"));
    }
    let [x, y, z] = axis.unit()?;
    let (s, co) = (angle / 2.0).sin_cos();
    Ok(Mat::from_row_slice(2, 2, &[c(co, -s * z), c(-s * y, -s * x), c(s * y, -s * x), c(co, s * z)]))
}

/// Single-qubit rotation embedded on `qubit` of an `n`-qubit register.
pub fn rotation(axis: Axis, angle: f64, qubit: usize, n: usize) -> Result<Mat> {
    if qubit >= n {
        return Err(invalid(format!("qubit {qubit} out of range for {n} qubits")));
    }
    embed(&rotation_1q(axis, angle)?, &[qubit], n)
}

/// `e^{iα} R_x(β) R_y(γ) R_x(δ)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl EulerAngles {
    pub fn compose(&self) -> Mat {
        let rx = |t| rotation_1q(Axis::X, t).unwrap();
        let ry = rotation_1q(Axis::Y, self.gamma).unwrap();
        rx(self.beta) * ry * rx(self.delta) * C64::from_polar(1.0, self.alpha)
    }
}

/// Decomposes a 2×2 unitary into x-y-x rotations with a global phase.
pub fn euler_decompose(u: &Mat) -> Result<EulerAngles> {
    if u.shape() != (2, 2) || !qop::is_unitary(u, 1e-10) {
        return Err(Error::InvalidOperator("a 2x2 unitary"));
    }
    // W = R_y(π/2) maps z to x, so W† u W has a z-y-z decomposition with the same angles
    let w = rotation_1q(Axis::Y, FRAC_PI_2)?;
    let v = w.adjoint() * u * &w;
    let det = v[(0, 0)] * v[(1, 1)] - v[(0, 1)] * v[(1, 0)];
    let alpha = det.arg() / 2.0;
    let s = &v * C64::from_polar(1.0, -alpha);
    let gamma = 2.0 * s[(1, 0)].norm().atan2(s[(0, 0)].norm());
    let tiny = 1e-12;
    let sum = if s[(1, 1)].norm() > tiny { 2.0 * s[(1, 1)].arg() } else { 0.0 };
    let diff = if s[(1, 0)].norm() > tiny { 2.0 * s[(1, 0)].arg() } else { 0.0 };
    let angles = EulerAngles { alpha, beta: (sum + diff) / 2.0, gamma, delta: (sum - diff) / 2.0 };
    debug_assert!(qop::max_abs_diff(&angles.compose(), u) < 1e-8);
    Ok(angles)
}

fn check_pair(sys: &SpinSystem, i: usize, j: usize) -> Result<f64> {
    let n = sys.n();
    if i >= n || j >= n || i == j {
        return Err(invalid(format!("invalid spin pair ({i}, {j}) for {n} spins")));
    }
    let jij = sys.j(i, j);
    if jij == 0.0 {
        return Err(invalid(format!("spins {i} and {j} are not coupled")));
    }
    Ok(jij)
}

/// `exp(−i 2π J_ij I_z^i I_z^j t)` on the pair, identity elsewhere.
pub fn j_evolution(sys: &SpinSystem, pair: (usize, usize), t: f64) -> Result<Mat> {
    let jij = check_pair(sys, pair.0, pair.1)?;
    Ok(zz_phase(sys.n(), pair, 2.0 * PI * jij * t / 4.0))
}

/// Diagonal `exp(−i θ Z_i Z_j)`.
fn zz_phase(n: usize, pair: (usize, usize), theta: f64) -> Mat {
    let d = 1usize << n;
    let bi = qop::bit_of(pair.0, n);
    let bj = qop::bit_of(pair.1, n);
    let diag = (0..d).map(|k| {
        let parity = ((k >> bi) ^ (k >> bj)) & 1;
        C64::from_polar(1.0, if parity == 0 { -theta } else { theta })
    });
    Mat::from_diagonal(&nalgebra::DVector::from_iterator(d, diag))
}

/// NMR pulse-sequence CNOT
/// `√i · R_z^c(π/2) · R_z^t(−π/2) · R_x^t(π/2) · U(1/2J) · R_y^t(π/2)`.
///
/// For negative couplings the free evolution is bracketed by π pulses on the
/// target so the effective coupling phase keeps its sign.
pub fn cnot_sequence(sys: &SpinSystem, control: usize, target: usize) -> Result<Mat> {
    let jij = check_pair(sys, control, target)?;
    let n = sys.n();
    let t = 1.0 / (2.0 * jij.abs());
    let mut free = j_evolution(sys, (control, target), t)?;
    if jij < 0.0 {
        let flip = rotation(Axis::X, PI, target, n)?;
        free = &flip * free * &flip;
    }
    let sqrt_i = C64::from_polar(1.0, PI / 4.0);
    Ok(rotation(Axis::Z, FRAC_PI_2, control, n)?
        * rotation(Axis::Z, -FRAC_PI_2, target, n)?
        * rotation(Axis::X, FRAC_PI_2, target, n)?
        * free
        * rotation(Axis::Y, FRAC_PI_2, target, n)?
        * sqrt_i)
}

/// Canonical CNOT with `control`, `target` on an `n`-qubit register.
pub fn cnot_matrix(control: usize, target: usize, n: usize) -> Mat {
    let d = 1usize << n;
    let cb = 1 << qop::bit_of(control, n);
    let tb = 1 << qop::bit_of(target, n);
    let mut m = Mat::zeros(d, d);
    for k in 0..d {
        let out = if k & cb != 0 { k ^ tb } else { k };
        m[(out, k)] = qop::ONE;
    }
    m
}

/// Instantaneous π_x pulses applied on a set of spins after segment `segment`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiPulse {
    pub segment: usize,
    pub time: f64,
    pub spins: Vec<usize>,
}

/// Refocusing schedule and its simulated propagator.
#[derive(Debug, Clone)]
pub struct RefocusSchedule {
    pub segments: usize,
    pub pulses: Vec<PiPulse>,
    /// ±1 toggling-frame sign of each spin in each segment.
    pub signs: Vec<Vec<i8>>,
    pub unitary: Mat,
    pub target: Mat,
}

fn walsh(row: usize, m: usize) -> i8 {
    if (row & m).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Builds a π-pulse schedule that keeps only the coupling of `keep` active
/// for time `t` and removes every other coupling and all offsets.
pub fn refocus_all_but(sys: &SpinSystem, keep: (usize, usize), t: f64) -> Result<RefocusSchedule> {
    check_pair(sys, keep.0, keep.1)?;
    if !sys.strongly_coupled_pairs().is_empty() {
        return Err(invalid("refocusing requires a weakly coupled system"));
    }
    let n = sys.n();
    if n > 8 {
        return Err(invalid("no sign assignment implemented for more than 8 spins"));
    }
    let m = n.next_power_of_two().max(2);
    // kept pair share Walsh row 1; every other spin gets its own nonzero row
    let mut rows = vec![0usize; n];
    rows[keep.0] = 1;
    rows[keep.1] = 1;
    let mut next = 2;
    for (q, row) in rows.iter_mut().enumerate() {
        if q != keep.0 && q != keep.1 {
            *row = next;
            next += 1;
        }
    }
    if next > m {
        return Err(invalid("not enough orthogonal sign rows"));
    }
    let signs: Vec<Vec<i8>> = rows.iter().map(|&row| (0..m).map(|s| walsh(row, s)).collect()).collect();
    let dt = t / m as f64;
    let free = expm_hermitian(&internal_hamiltonian(sys, true), dt);
    let mut pulses = Vec::new();
    let mut u = identity(sys.dim());
    for seg in 0..m {
        u = &free * u;
        let next_sign = |q: usize| if seg + 1 < m { signs[q][seg + 1] } else { 1 };
        let flips: Vec<usize> = (0..n).filter(|&q| signs[q][seg] != next_sign(q)).collect();
        if !flips.is_empty() {
            for &q in &flips {
                u = rotation(Axis::X, PI, q, n)? * u;
            }
            pulses.push(PiPulse { segment: seg, time: dt * (seg + 1) as f64, spins: flips });
        }
    }
    let target = j_evolution(sys, keep, t)?;
    Ok(RefocusSchedule { segments: m, pulses, signs, unitary: u, target })
}

/// `exp(−i [H_int + Σ u_k H_k] Δt)`
pub fn step_propagator(h_int: &Mat, controls: &[f64], control_ops: &[Mat], dt: f64) -> Result<Mat> {
    if controls.len() != control_ops.len() {
        return Err(Error::DimensionMismatch { expected: control_ops.len(), got: controls.len() });
    }
    let mut h = h_int.clone();
    for (u, op) in controls.iter().zip(control_ops) {
        if op.shape() != h.shape() {
            return Err(Error::DimensionMismatch { expected: h.nrows(), got: op.nrows() });
        }
        h += op * r(*u);
    }
    Ok(expm_hermitian(&h, dt))
}

/// Channel names and Hamiltonians: one `x`/`y` pair per species group.
pub fn control_operators(sys: &SpinSystem) -> (Vec<String>, Vec<Mat>) {
    let n = sys.n();
    let mut names = Vec::new();
    let mut ops = Vec::new();
    for (species, members) in sys.species_groups() {
        for (axis, label) in [(Pauli::X, "x"), (Pauli::Y, "y")] {
            names.push(format!("{species}:{label}"));
            ops.push(members.iter().fold(Mat::zeros(sys.dim(), sys.dim()), |acc, &q| acc + spin_op(n, q, axis)));
        }
    }
    (names, ops)
}

/// Matches `a` to `b` up to global phase: `|Tr(a b†)| / d`.
pub fn phase_insensitive_overlap(a: &Mat, b: &Mat) -> f64 {
    qop::trace_product(a, &b.adjoint()).norm() / a.nrows() as f64
}

/// Frobenius overlap of a diagonal propagator's generator with a Pauli term,
/// `|Tr(G P)| / d` where `U = exp(−i G)` and phases are unwrapped around the
/// first diagonal entry.
pub fn diagonal_generator_overlap(u: &Mat, p: &PauliString) -> f64 {
    let d = u.nrows();
    let ref_phase = u[(0, 0)].arg();
    let g: Vec<f64> = (0..d)
        .map(|k| {
            let mut ph = -(u[(k, k)].arg() - ref_phase);
            while ph > PI {
                ph -= 2.0 * PI;
            }
            while ph <= -PI {
                ph += 2.0 * PI;
            }
            ph
        })
        .collect();
    let pd = p.dense();
    (0..d).map(|k| g[k] * pd[(k, k)].re).sum::<f64>().abs() / d as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qop::pauli::ps;
    use crate::qop::{basis, max_abs_diff, random_unitary};
    use crate::spin::Preset;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotation_examples() {
        assert!(max_abs_diff(&rotation(Axis::X, 0.0, 0, 1).unwrap(), &identity(2)) < 1e-15);
        let out = rotation(Axis::X, PI, 0, 1).unwrap() * basis(2, 0);
        assert!((out[1] - c(0.0, -1.0)).norm() < 1e-15 && out[0].norm() < 1e-15);
        let out = rotation(Axis::Y, FRAC_PI_2, 0, 1).unwrap() * basis(2, 0);
        let h = 1.0 / 2f64.sqrt();
        assert!((out[0] - r(h)).norm() < 1e-15 && (out[1] - r(h)).norm() < 1e-15);
        assert!(rotation(Axis::Vector([0.0; 3]), 1.0, 0, 1).is_err());
    }

    #[test]
    fn rotation_matches_exponential() {
        for (axis, gen) in [(Axis::X, ps("X")), (Axis::Y, ps("Y")), (Axis::Z, ps("Z"))] {
            let oracle = (gen.dense() * c(0.0, -0.35)).exp();
            assert!(max_abs_diff(&rotation_1q(axis, 0.7).unwrap(), &oracle) < 1e-14);
        }
        // RF phase convention: φ = π/2 rotates about −y
        let a = rotation_1q(Axis::Phase(FRAC_PI_2), 0.9).unwrap();
        assert!(max_abs_diff(&a, &rotation_1q(Axis::Y, -0.9).unwrap()) < 1e-14);
    }

    #[test]
    fn euler_examples() {
        let e = euler_decompose(&identity(2)).unwrap();
        assert!(max_abs_diff(&e.compose(), &identity(2)) < 1e-12);
        let ry = rotation_1q(Axis::Y, 0.8).unwrap();
        let e = euler_decompose(&ry).unwrap();
        assert!(max_abs_diff(&e.compose(), &ry) < 1e-12);
        let had = Mat::from_row_slice(2, 2, &[r(1.0), r(1.0), r(1.0), r(-1.0)]) * r(1.0 / 2f64.sqrt());
        assert!(max_abs_diff(&euler_decompose(&had).unwrap().compose(), &had) < 1e-10);
        let mut g = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let u = random_unitary(2, &mut g);
            assert!(max_abs_diff(&euler_decompose(&u).unwrap().compose(), &u) < 1e-10);
        }
        for axis in [Axis::X, Axis::Z] {
            for t in [0.0, PI, -PI, 2.0 * PI] {
                let u = rotation_1q(axis, t).unwrap();
                assert!(max_abs_diff(&euler_decompose(&u).unwrap().compose(), &u) < 1e-10);
            }
        }
        assert!(euler_decompose(&(identity(2) * r(2.0))).is_err());
    }

    fn pair(j: f64) -> SpinSystem {
        SpinSystem::homonuclear(vec![300.0, -200.0], vec![vec![0.0, j], vec![j, 0.0]]).unwrap()
    }

    #[test]
    fn j_evolution_examples() {
        let s = pair(100.0);
        assert!(max_abs_diff(&j_evolution(&s, (0, 1), 0.0).unwrap(), &identity(4)) < 1e-15);
        let u = j_evolution(&s, (0, 1), 1.0 / 200.0).unwrap();
        let (m, p) = (C64::from_polar(1.0, -PI / 4.0), C64::from_polar(1.0, PI / 4.0));
        let expect = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![m, p, p, m]));
        assert!(max_abs_diff(&u, &expect) < 1e-15);
        let full = j_evolution(&s, (0, 1), 2.0 / 100.0).unwrap();
        assert!((phase_insensitive_overlap(&full, &identity(4)) - 1.0).abs() < 1e-12);
        let uncoupled = pair(0.0);
        assert!(j_evolution(&uncoupled, (0, 1), 1.0).is_err());
    }

    #[test]
    fn cnot_sequence_is_cnot() {
        for j in [215.0, -140.0] {
            let u = cnot_sequence(&pair(j), 0, 1).unwrap();
            let cnot = cnot_matrix(0, 1, 2);
            assert!((phase_insensitive_overlap(&u, &cnot) - 1.0).abs() < 1e-10, "J = {j}");
            let out = &u * basis(4, 0b10);
            assert!((out[0b11].norm() - 1.0).abs() < 1e-10);
            let out = &u * basis(4, 0b00);
            assert!((out[0b00].norm() - 1.0).abs() < 1e-10);
        }
        let reversed = cnot_sequence(&pair(215.0), 1, 0).unwrap();
        assert!((phase_insensitive_overlap(&reversed, &cnot_matrix(1, 0, 2)) - 1.0).abs() < 1e-10);
        assert!(cnot_sequence(&pair(0.0), 0, 1).is_err());
    }

    #[test]
    fn refocus_two_spins_is_single_echo() {
        let s = pair(40.0);
        let sched = refocus_all_but(&s, (0, 1), 0.004).unwrap();
        assert_eq!(sched.segments, 2);
        assert_eq!(sched.pulses.len(), 2);
        assert!((phase_insensitive_overlap(&sched.unitary, &sched.target) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn refocus_three_spin_chain() {
        let s = Preset::Malonic.load();
        let t = 0.002;
        let sched = refocus_all_but(&s, (0, 1), t).unwrap();
        assert!((phase_insensitive_overlap(&sched.unitary, &sched.target) - 1.0).abs() < 1e-8);
        for term in ["IZZ", "ZIZ", "ZII", "IZI", "IIZ"] {
            assert!(diagonal_generator_overlap(&sched.unitary, &ps(term)) < 1e-8, "{term}");
        }
        let kept = diagonal_generator_overlap(&sched.unitary, &ps("ZZI"));
        assert!((kept - 2.0 * PI * s.j(0, 1) * t / 4.0).abs() < 1e-8);
        let mut no_j = s.couplings().to_vec();
        no_j[0][1] = 0.0;
        no_j[1][0] = 0.0;
        let s0 = SpinSystem::homonuclear(s.offsets().to_vec(), no_j).unwrap();
        assert!(refocus_all_but(&s0, (0, 1), t).is_err());
    }

    #[test]
    fn step_propagator_examples() {
        let (_, ops) = control_operators(&SpinSystem::homonuclear(vec![0.0], vec![vec![0.0]]).unwrap());
        let zero = Mat::zeros(2, 2);
        assert!(max_abs_diff(&step_propagator(&zero, &[0.0, 0.0], &ops, 1e-5).unwrap(), &identity(2)) < 1e-15);
        let dt = 1e-5;
        let u = step_propagator(&zero, &[PI / dt, 0.0], &ops, dt).unwrap();
        assert!(max_abs_diff(&u, &rotation_1q(Axis::X, PI).unwrap()) < 1e-12);
        let mut g = ChaCha8Rng::seed_from_u64(4);
        let a = random_unitary(4, &mut g);
        let h = (&a + a.adjoint()) * r(1e3);
        let b = random_unitary(4, &mut g);
        let hk = (&b + b.adjoint()) * r(0.5);
        let ours = step_propagator(&h, &[700.0], std::slice::from_ref(&hk), 1e-4).unwrap();
        let oracle = ((h + hk * r(700.0)) * c(0.0, -1e-4)).exp();
        assert!(max_abs_diff(&ours, &oracle) < 1e-12);
    }

    #[test]
    fn control_channels_per_species() {
        let (names, ops) = control_operators(&Preset::Chloroform.load());
        assert_eq!(names, vec!["1H:x", "1H:y", "13C:x", "13C:y"]);
        assert!(max_abs_diff(&ops[0], &(ps("XI").dense() * r(0.5))) < 1e-15);
        let (names, ops) = control_operators(&Preset::Malonic.load());
        assert_eq!(names.len(), 2);
        assert!(max_abs_diff(&ops[1], &(crate::spin::total_spin(3, Pauli::Y))) < 1e-15);
    }
}
