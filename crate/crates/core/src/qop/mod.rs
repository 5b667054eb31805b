// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex operator algebra: states, unitaries, tensor products,
//! partial traces and fidelities.

pub mod pauli;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::noise::Channel;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Ket = DVector<C64>;

/// Numerical slack used by the validators.
#[derive(Debug, Clone, Copy)]
pub struct Slack {
    pub hermitian: f64,
    pub trace: f64,
    pub unitary: f64,
    pub psd: f64,
}

impl Default for Slack {
    fn default() -> Self {
        Slack { hermitian: 1e-12, trace: 1e-12, unitary: 1e-10, psd: 1e-10 }
    }
}

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(d: usize) -> Mat {
    Mat::identity(d, d)
}

/// Number of qubits for a 2^n dimension.
pub fn num_qubits(d: usize) -> Result<usize> {
    if d == 0 || !d.is_power_of_two() {
        return Err(invalid(format!("dimension {d} is not a power of two")));
    }
    Ok(d.trailing_zeros() as usize)
}

pub fn tensor(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn tensor_all<'a>(ops: impl IntoIterator<Item = &'a Mat>) -> Mat {
    ops.into_iter().fold(Mat::identity(1, 1), |acc, m| acc.kronecker(m))
}

/// Computational basis ket |k⟩ in dimension d.
pub fn basis(d: usize, k: usize) -> Ket {
    let mut v = Ket::zeros(d);
    v[k] = ONE;
    v
}

pub fn projector(psi: &Ket) -> Mat {
    psi * psi.adjoint()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &Mat, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

pub fn is_unitary(u: &Mat, tol: f64) -> bool {
    u.is_square() && (u * u.adjoint() - identity(u.nrows())).norm() <= tol
}

fn check_square_pow2(m: &Mat) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::InvalidOperator("square"));
    }
    num_qubits(m.nrows())
}

/// Checks the density-operator invariants with the given slack.
pub fn validate_density(rho: &Mat, slack: Slack) -> Result<()> {
    check_square_pow2(rho)?;
    if !is_hermitian(rho, slack.hermitian) {
        return Err(Error::InvalidOperator("Hermitian"));
    }
    if (rho.trace() - ONE).norm() > slack.trace {
        return Err(Error::InvalidOperator("unit trace"));
    }
    let (vals, _) = herm_eig(rho);
    if vals.iter().any(|&v| v < -slack.psd) {
        return Err(Error::InvalidOperator("positive semidefinite"));
    }
    Ok(())
}

pub fn validate_unitary(u: &Mat, slack: Slack) -> Result<()> {
    check_square_pow2(u)?;
    if !is_unitary(u, slack.unitary) {
        return Err(Error::InvalidOperator("unitary"));
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix (eigenvalues ascending).
pub fn herm_eig(h: &Mat) -> (Vec<f64>, Mat) {
    let sym = (h + h.adjoint()) * r(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = Mat::from_fn(h.nrows(), idx.len(), |row, col| eig.eigenvectors[(row, idx[col])]);
    (vals, vecs)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn herm_fn(h: &Mat, f: impl Fn(f64) -> C64) -> Mat {
    let (vals, v) = herm_eig(h);
    let mut vd = v.clone();
    for (j, lam) in vals.iter().enumerate() {
        let s = f(*lam);
        for i in 0..vd.nrows() {
            vd[(i, j)] *= s;
        }
    }
    vd * v.adjoint()
}

/// `exp(−i H t)` for Hermitian `H`.
pub fn expm_hermitian(h: &Mat, t: f64) -> Mat {
    herm_fn(h, |lam| C64::from_polar(1.0, -lam * t))
}

pub fn conjugate(rho: &Mat, u: &Mat) -> Mat {
    u * rho * u.adjoint()
}

/// Bit position (from the least significant end) of qubit `q` in an `n`-qubit index.
#[inline]
pub fn bit_of(q: usize, n: usize) -> usize {
    n - 1 - q
}

/// Precomputed index layout for a local operator on `qubits`.
struct Local {
    offsets: Vec<usize>,
    mask: usize,
}

impl Local {
    fn new(qubits: &[usize], n: usize) -> Result<Self> {
        let k = qubits.len();
        let mut mask = 0usize;
        for &q in qubits {
            if q >= n {
                return Err(invalid(format!("qubit {q} out of range for {n} qubits")));
            }
            let b = 1 << bit_of(q, n);
            if mask & b != 0 {
                return Err(invalid(format!("duplicate qubit {q}")));
            }
            mask |= b;
        }
        let offsets = (0..1usize << k)
            .map(|s| {
                (0..k).fold(0, |acc, j| {
                    if s >> (k - 1 - j) & 1 == 1 {
                        acc | 1 << bit_of(qubits[j], n)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        Ok(Local { offsets, mask })
    }
}

/// `(op ⊗ I) · m` where `op` acts on `qubits` (listed most significant first).
pub fn apply_left(m: &Mat, op: &Mat, qubits: &[usize], n: usize) -> Result<Mat> {
    let d = 1usize << n;
    let k = qubits.len();
    if m.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, got: m.nrows() });
    }
    if op.nrows() != 1 << k || op.ncols() != 1 << k {
        return Err(Error::DimensionMismatch { expected: 1 << k, got: op.nrows() });
    }
    let loc = Local::new(qubits, n)?;
    let ks = 1usize << k;
    let mut out = Mat::zeros(d, m.ncols());
    let mut buf = vec![ZERO; ks];
    for base in (0..d).filter(|b| b & loc.mask == 0) {
        for col in 0..m.ncols() {
            for s in 0..ks {
                buf[s] = m[(base | loc.offsets[s], col)];
            }
            for rr in 0..ks {
                let mut acc = ZERO;
                for s in 0..ks {
                    acc += op[(rr, s)] * buf[s];
                }
                out[(base | loc.offsets[rr], col)] = acc;
            }
        }
    }
    Ok(out)
}

/// `K ρ K†` with `K` local to `qubits`.
pub fn apply_local(rho: &Mat, op: &Mat, qubits: &[usize], n: usize) -> Result<Mat> {
    let left = apply_left(rho, op, qubits, n)?;
    Ok(apply_left(&left.adjoint(), op, qubits, n)?.adjoint())
}

/// Local operator `op` on `qubits`, applied to a state vector.
pub fn apply_local_ket(psi: &Ket, op: &Mat, qubits: &[usize], n: usize) -> Result<Ket> {
    let m = Mat::from_column_slice(psi.len(), 1, psi.as_slice());
    let out = apply_left(&m, op, qubits, n)?;
    Ok(Ket::from_column_slice(out.as_slice()))
}

/// Dense embedding of a local operator into the full `n`-qubit space.
pub fn embed(op: &Mat, qubits: &[usize], n: usize) -> Result<Mat> {
    apply_left(&identity(1 << n), op, qubits, n)
}

/// Reduced state on `keep` (output ordered by ascending qubit index).
pub fn partial_trace(rho: &Mat, keep: &[usize]) -> Result<Mat> {
    let n = check_square_pow2(rho)?;
    if keep.is_empty() {
        return Err(invalid("partial trace needs a nonempty keep set"));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&q| q >= n) {
        return Err(invalid("keep index out of range"));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let spread = |bits: usize, qs: &[usize]| -> usize {
        let k = qs.len();
        (0..k).fold(0, |acc, j| if bits >> (k - 1 - j) & 1 == 1 { acc | 1 << bit_of(qs[j], n) } else { acc })
    };
    let dk = 1usize << keep.len();
    let dt = 1usize << traced.len();
    let kidx: Vec<usize> = (0..dk).map(|a| spread(a, &keep)).collect();
    let tidx: Vec<usize> = (0..dt).map(|t| spread(t, &traced)).collect();
    Ok(Mat::from_fn(dk, dk, |a, b| tidx.iter().map(|&t| rho[(kidx[a] | t, kidx[b] | t)]).sum()))
}

/// `Tr(ρ·obs)` for Hermitian `obs`.
pub fn expectation(rho: &Mat, obs: &Mat) -> Result<f64> {
    if rho.nrows() != obs.nrows() || !obs.is_square() || !rho.is_square() {
        return Err(Error::DimensionMismatch { expected: rho.nrows(), got: obs.nrows() });
    }
    if !is_hermitian(obs, 1e-10) {
        return Err(Error::InvalidOperator("Hermitian"));
    }
    Ok(trace_product(rho, obs).re)
}

/// `Tr(A·B)` without forming the product.
pub fn trace_product(a: &Mat, b: &Mat) -> C64 {
    let d = a.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Expectation of a Hermitian Pauli string, computed without dense expansion.
pub fn pauli_expectation(rho: &Mat, p: &pauli::PauliString) -> f64 {
    let xm = p.x_mask();
    (0..rho.nrows()).map(|row| p.row_coeff(row) * rho[(row ^ xm, row)]).sum::<C64>().re
}

/// Hilbert–Schmidt gate fidelity `|Tr(U_th U_exp†)|² / d²`.
pub fn gate_fidelity_hs(u_th: &Mat, u_exp: &Mat) -> Result<f64> {
    if u_th.shape() != u_exp.shape() || !u_th.is_square() {
        return Err(Error::DimensionMismatch { expected: u_th.nrows(), got: u_exp.nrows() });
    }
    let d = u_th.nrows() as f64;
    let tr = trace_product(u_th, &u_exp.adjoint());
    Ok((tr.norm_sqr() / (d * d)).min(1.0))
}

/// Uhlmann fidelity `(Tr√(√ρ σ √ρ))²`.
pub fn state_fidelity(rho: &Mat, sigma: &Mat) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch { expected: rho.nrows(), got: sigma.nrows() });
    }
    let slack = Slack::default();
    for m in [rho, sigma] {
        let (vals, _) = herm_eig(m);
        if vals.iter().any(|&v| v < -slack.psd) {
            return Err(Error::InvalidOperator("positive semidefinite"));
        }
    }
    // eigenvalues at rounding level would contribute O(1e-8) after the square root
    let floor = 1e-14;
    let sq = herm_fn(rho, |l| r(if l > floor { l.sqrt() } else { 0.0 }));
    let inner = &sq * sigma * &sq;
    let (vals, _) = herm_eig(&inner);
    let t: f64 = vals.iter().map(|&v| if v > floor { v.sqrt() } else { 0.0 }).sum();
    Ok((t * t).clamp(0.0, 1.0))
}

/// Entanglement fidelity of `U†∘Λ`: `(1/d²) Σ_ij ⟨i|U† Λ(|i⟩⟨j|) U|j⟩`.
pub fn entanglement_fidelity(channel: &Channel, u_target: &Mat) -> Result<f64> {
    let d = 1usize << channel.n();
    if u_target.nrows() != d || !u_target.is_square() {
        return Err(Error::DimensionMismatch { expected: d, got: u_target.nrows() });
    }
    channel.check_trace_preserving(1e-10)?;
    let ud = u_target.adjoint();
    let mut acc = ZERO;
    let mut unit = Mat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            unit[(i, j)] = ONE;
            let out = channel.apply_linear(&unit)?;
            unit[(i, j)] = ZERO;
            // ⟨i|U† M U|j⟩
            let v = &out * u_target.column(j);
            acc += (0..d).map(|k| ud[(i, k)] * v[k]).sum::<C64>();
        }
    }
    Ok(acc.re / (d * d) as f64)
}

/// Average gate fidelity of `channel` against `u_target`, `(d F_e + 1)/(d + 1)`.
pub fn average_gate_fidelity_exact(channel: &Channel, u_target: &Mat) -> Result<f64> {
    let fe = entanglement_fidelity(channel, u_target)?;
    let d = (1usize << channel.n()) as f64;
    Ok((d * fe + 1.0) / (d + 1.0))
}

/// Haar-random unitary via QR of a complex Ginibre matrix.
pub fn random_unitary<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> Mat {
    use rand_distr::{Distribution, StandardNormal};
    let g = Mat::from_fn(d, d, |_, _| {
        c(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let qr = g.qr();
    let q = qr.q();
    let rr = qr.r();
    // fix the phases so the distribution is Haar
    let mut u = q;
    for j in 0..d {
        let z = rr[(j, j)];
        let ph = if z.norm() > 0.0 { z / z.norm() } else { ONE };
        for i in 0..d {
            u[(i, j)] *= ph;
        }
    }
    u
}

pub fn random_ket<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> Ket {
    use rand_distr::{Distribution, StandardNormal};
    let v = Ket::from_fn(d, |_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let nrm = v.norm();
    v / r(nrm)
}

/// Random full-rank mixed state `G G† / Tr(G G†)`.
pub fn random_density<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> Mat {
    use rand_distr::{Distribution, StandardNormal};
    let g = Mat::from_fn(d, d, |_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let m = &g * g.adjoint();
    let t = m.trace();
    m / t
}

pub fn maximally_mixed(n: usize) -> Mat {
    let d = 1usize << n;
    identity(d) / r(d as f64)
}

#[cfg(test)]
mod tests {
    use super::pauli::{ps, Pauli, PauliString};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn pauli_dense_examples() {
        assert_eq!(ps("I").dense(), identity(2));
        let zz = ps("ZZ").dense();
        let expect = Mat::from_diagonal(&Ket::from_vec(vec![ONE, -ONE, -ONE, ONE]));
        assert_eq!(zz, expect);
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(tensor(&identity(2), &identity(2)), identity(4));
        let x1 = tensor(&Pauli::X.matrix(), &identity(2));
        assert_eq!(x1 * basis(4, 0b00), basis(4, 0b10));
        let mut g = rng();
        let [a, b, cc, dd] = [0, 1, 2, 3].map(|_| random_unitary(2, &mut g));
        let lhs = tensor(&a, &b) * tensor(&cc, &dd);
        let rhs = tensor(&(&a * &cc), &(&b * &dd));
        assert!(max_abs_diff(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn partial_trace_examples() {
        let p00 = projector(&basis(4, 0));
        assert_eq!(partial_trace(&p00, &[0]).unwrap(), projector(&basis(2, 0)));
        let bell = (basis(4, 0) + basis(4, 3)) / r(2f64.sqrt());
        let red = partial_trace(&projector(&bell), &[0]).unwrap();
        assert!(max_abs_diff(&red, &maximally_mixed(1)) < 1e-15);
        assert!(partial_trace(&p00, &[]).is_err());
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let mut g = rng();
        let a = random_density(4, &mut g);
        let b = random_density(2, &mut g);
        let ab = tensor(&a, &b);
        assert!(max_abs_diff(&partial_trace(&ab, &[0, 1]).unwrap(), &a) < 1e-12);
        assert!(max_abs_diff(&partial_trace(&ab, &[2]).unwrap(), &b) < 1e-12);
    }

    #[test]
    fn expectation_examples() {
        let z = Pauli::Z.matrix();
        assert_eq!(expectation(&maximally_mixed(1), &z).unwrap(), 0.0);
        assert_eq!(expectation(&projector(&basis(2, 0)), &z).unwrap(), 1.0);
        assert!(expectation(&maximally_mixed(2), &z).is_err());
    }

    #[test]
    fn pauli_expectation_matches_dense() {
        let mut g = rng();
        let rho = random_density(8, &mut g);
        for p in PauliString::all(3) {
            let dense = expectation(&rho, &p.dense()).unwrap();
            assert!((pauli_expectation(&rho, &p) - dense).abs() < 1e-14);
        }
    }

    #[test]
    fn hs_fidelity_examples() {
        let mut g = rng();
        let u = random_unitary(4, &mut g);
        assert!((gate_fidelity_hs(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(gate_fidelity_hs(&identity(2), &Pauli::X.matrix()).unwrap(), 0.0);
        let rz = expm_hermitian(&(Pauli::Z.matrix() * r(0.5)), std::f64::consts::FRAC_PI_2);
        assert!((gate_fidelity_hs(&identity(2), &rz).unwrap() - 0.5).abs() < 1e-14);
        for k in 0..10 {
            let ph = C64::from_polar(1.0, 0.7 * k as f64 - 2.0);
            assert!((gate_fidelity_hs(&u, &(&u * ph)).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn state_fidelity_examples() {
        let mut g = rng();
        let rho = random_density(4, &mut g);
        assert!((state_fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        let p0 = projector(&basis(2, 0));
        let p1 = projector(&basis(2, 1));
        assert!(state_fidelity(&p0, &p1).unwrap().abs() < 1e-12);
        assert!((state_fidelity(&p0, &maximally_mixed(1)).unwrap() - 0.5).abs() < 1e-12);
        // pure-state reduction
        let psi = random_ket(4, &mut g);
        let f = state_fidelity(&projector(&psi), &rho).unwrap();
        let direct = (psi.adjoint() * &rho * &psi)[(0, 0)].re;
        assert!((f - direct).abs() < 1e-9);
    }

    #[test]
    fn expm_matches_pade_oracle() {
        let mut g = rng();
        for d in [2, 4, 8] {
            let a = Mat::from_fn(d, d, |_, _| c(rand::Rng::random::<f64>(&mut g) - 0.5, rand::Rng::random::<f64>(&mut g) - 0.5));
            let h = &a + a.adjoint();
            let ours = expm_hermitian(&h, 0.8);
            let oracle = (h * c(0.0, -0.8)).exp();
            assert!(max_abs_diff(&ours, &oracle) < 1e-12);
        }
    }

    #[test]
    fn local_application_matches_dense_embedding() {
        let mut g = rng();
        let n = 4;
        let rho = random_density(16, &mut g);
        for qubits in [vec![0], vec![3], vec![2, 0], vec![1, 3, 2]] {
            let u = random_unitary(1 << qubits.len(), &mut g);
            let full = embed(&u, &qubits, n).unwrap();
            // independent kron-based oracle for the single-qubit case
            if qubits.len() == 1 {
                let q = qubits[0];
                let mut ops = vec![identity(2); n];
                ops[q] = u.clone();
                assert!(max_abs_diff(&full, &tensor_all(ops.iter())) < 1e-14);
            }
            let fast = apply_local(&rho, &u, &qubits, n).unwrap();
            assert!(max_abs_diff(&fast, &conjugate(&rho, &full)) < 1e-13);
            assert!((fast.trace() - ONE).norm() < 1e-12);
        }
        assert!(apply_local(&rho, &identity(4), &[1, 1], n).is_err());
    }

    #[test]
    fn average_fidelity_examples() {
        let id = Channel::identity(1);
        assert!((average_gate_fidelity_exact(&id, &identity(2)).unwrap() - 1.0).abs() < 1e-15);
        let full = Channel::depolarizing(1, 1.0).unwrap();
        assert!((average_gate_fidelity_exact(&full, &identity(2)).unwrap() - 0.5).abs() < 1e-15);
        let flip = Channel::pauli(vec![(ps("I"), 0.9), (ps("X"), 0.1)]).unwrap();
        let f = average_gate_fidelity_exact(&flip, &identity(2)).unwrap();
        assert!((f - (2.0 * 0.9 + 1.0) / 3.0).abs() < 1e-14);
        // Kraus form of the same channel gives the same number
        let kraus = Channel::kraus(flip.to_kraus().unwrap()).unwrap();
        assert!((average_gate_fidelity_exact(&kraus, &identity(2)).unwrap() - f).abs() < 1e-14);
        let leaky = Channel::kraus(vec![identity(2) * r(0.5)]);
        assert!(leaky.is_err());
    }

    #[test]
    fn average_fidelity_matches_haar_average() {
        let mut g = rng();
        let ch = Channel::pauli(vec![(ps("II"), 0.8), (ps("XI"), 0.1), (ps("ZY"), 0.1)]).unwrap();
        let u = random_unitary(4, &mut g);
        let noisy = Channel::compose(vec![ch, Channel::unitary(u.clone()).unwrap()]).unwrap();
        let exact = average_gate_fidelity_exact(&noisy, &u).unwrap();
        let samples: Vec<f64> = (0..10_000)
            .map(|_| {
                let psi = random_ket(4, &mut g);
                let out = noisy.apply(&projector(&psi)).unwrap();
                let target = &u * &psi;
                (target.adjoint() * out * target)[(0, 0)].re
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
        let se = (var / samples.len() as f64).sqrt();
        assert!((mean - exact).abs() < 3.0 * se, "{mean} vs {exact} (se {se})");
    }

    #[test]
    fn unitary_preserves_trace() {
        let mut g = rng();
        for _ in 0..10 {
            let rho = random_density(8, &mut g);
            let u = random_unitary(8, &mut g);
            assert!((conjugate(&rho, &u).trace() - rho.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn validators() {
        let s = Slack::default();
        assert!(validate_density(&maximally_mixed(2), s).is_ok());
        assert!(validate_density(&(maximally_mixed(2) * r(2.0)), s).is_err());
        let bad = Mat::from_diagonal(&Ket::from_vec(vec![r(1.5), r(-0.5)]));
        assert!(validate_density(&bad, s).is_err());
        assert!(validate_unitary(&Pauli::Y.matrix(), s).is_ok());
        assert!(validate_unitary(&(Pauli::Y.matrix() * r(1.1)), s).is_err());
    }
}
