// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! Clifford tableaux: images of the `X_q` and `Z_q` generators.

use std::collections::HashSet;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::qop::pauli::{Pauli, PauliString};
use crate::qop::{self, Ket, Mat, C64};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    x_img: Vec<PauliString>,
    z_img: Vec<PauliString>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        CliffordTableau {
            x_img: (0..n).map(|q| PauliString::single(n, q, Pauli::X)).collect(),
            z_img: (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect(),
        }
    }

    /// Builds a tableau from generator images, checking Hermiticity and the
    /// canonical commutation relations.
    pub fn from_images(x_img: Vec<PauliString>, z_img: Vec<PauliString>) -> Result<Self> {
        let n = x_img.len();
        if z_img.len() != n || x_img.iter().chain(&z_img).any(|p| p.n() != n) {
            return Err(invalid("tableau images must be n strings of length n"));
        }
        if x_img.iter().chain(&z_img).any(|p| !p.is_hermitian() || p.is_identity()) {
            return Err(Error::NotClifford("images must be signed non-identity Pauli strings".into()));
        }
        for a in 0..n {
            for b in 0..n {
                let xz = x_img[a].commutes_with(&z_img[b]);
                if xz == (a == b) || (a != b && !x_img[a].commutes_with(&x_img[b])) || (a != b && !z_img[a].commutes_with(&z_img[b])) {
                    return Err(Error::NotClifford("images violate the symplectic relations".into()));
                }
            }
        }
        Ok(CliffordTableau { x_img, z_img })
    }

    pub fn n(&self) -> usize {
        self.x_img.len()
    }

    pub fn x_image(&self, q: usize) -> &PauliString {
        &self.x_img[q]
    }

    pub fn z_image(&self, q: usize) -> &PauliString {
        &self.z_img[q]
    }

    /// `C p C†`
    pub fn conjugate(&self, p: &PauliString) -> PauliString {
        let n = self.n();
        assert_eq!(p.n(), n, "Pauli string length does not match tableau");
        let mut out = PauliString::identity(n).times_phase(p.phase());
        for (q, letter) in p.word().iter().enumerate() {
            match letter {
                Pauli::I => {}
                Pauli::X => out = out.mul(&self.x_img[q]),
                Pauli::Z => out = out.mul(&self.z_img[q]),
                // Y = i X Z
                Pauli::Y => out = out.mul(&self.x_img[q].mul(&self.z_img[q])).times_phase(1),
            }
        }
        out
    }

    /// `self` followed by `next`, i.e. the operator `next · self`.
    pub fn then(&self, next: &CliffordTableau) -> CliffordTableau {
        CliffordTableau {
            x_img: self.x_img.iter().map(|p| next.conjugate(p)).collect(),
            z_img: self.z_img.iter().map(|p| next.conjugate(p)).collect(),
        }
    }

    /// Symplectic matrix over GF(2): column j is the image of generator j
    /// (`X_0..X_{n−1}, Z_0..Z_{n−1}`) as `(x bits, z bits)`.
    fn symplectic(&self) -> Vec<Vec<bool>> {
        let n = self.n();
        let mut m = vec![vec![false; 2 * n]; 2 * n];
        for (j, img) in self.x_img.iter().chain(&self.z_img).enumerate() {
            for (q, l) in img.word().iter().enumerate() {
                let (x, z) = l.bits();
                m[q][j] = x;
                m[n + q][j] = z;
            }
        }
        m
    }

    pub fn inverse(&self) -> CliffordTableau {
        let n = self.n();
        let inv = gf2_inverse(&self.symplectic()).expect("Clifford tableaux are invertible");
        let preimage = |target: usize| -> PauliString {
            // bits of the generator product that maps onto generator `target`
            let bits: Vec<bool> = (0..2 * n).map(|i| inv[i][target]).collect();
            let word = (0..n).map(|q| Pauli::from_bits(bits[q], bits[n + q])).collect();
            let cand = PauliString::new(word);
            let img = self.conjugate(&cand);
            if img.phase() == 0 {
                cand
            } else {
                cand.negate()
            }
        };
        CliffordTableau { x_img: (0..n).map(preimage).collect(), z_img: (n..2 * n).map(preimage).collect() }
    }

    /// Dense unitary, correct up to a global phase.
    pub fn to_dense(&self) -> Mat {
        let n = self.n();
        let d = 1usize << n;
        // C|0…0⟩ is the joint +1 eigenvector of the Z images
        let mut proj = qop::identity(d);
        for z in &self.z_img {
            proj = (&proj + z.dense() * &proj) * qop::r(0.5);
        }
        let col = (0..d)
            .max_by(|&a, &b| proj.column(a).norm().partial_cmp(&proj.column(b).norm()).unwrap())
            .unwrap();
        let psi0: Ket = proj.column(col).into_owned();
        let psi0 = &psi0 / qop::r(psi0.norm());
        let mut u = Mat::zeros(d, d);
        for b in 0..d {
            let mut v = psi0.clone();
            for q in 0..n {
                if b >> qop::bit_of(q, n) & 1 == 1 {
                    v = self.x_img[q].apply_vec(&v);
                }
            }
            u.set_column(b, &v);
        }
        u
    }

    /// Tableau of a dense Clifford unitary.
    pub fn from_dense(u: &Mat) -> Result<Self> {
        let n = qop::num_qubits(u.nrows())?;
        if !qop::is_unitary(u, 1e-8) {
            return Err(Error::NotClifford("matrix is not unitary".into()));
        }
        let image = |p: PauliString| -> Result<PauliString> {
            let m = u * p.dense() * u.adjoint();
            PauliString::from_dense(&m, 1e-8)
                .filter(|q| q.is_hermitian())
                .ok_or_else(|| Error::NotClifford(format!("image of {p} is not a Pauli string")))
        };
        let x_img = (0..n).map(|q| image(PauliString::single(n, q, Pauli::X))).collect::<Result<_>>()?;
        let z_img = (0..n).map(|q| image(PauliString::single(n, q, Pauli::Z))).collect::<Result<_>>()?;
        Self::from_images(x_img, z_img)
    }

    /// Tensor product of single-qubit tableaux, qubit 0 first.
    pub fn from_local(parts: &[CliffordTableau]) -> Self {
        let n = parts.len();
        let lift = |q: usize, p: &PauliString| {
            let mut w = vec![Pauli::I; n];
            w[q] = p.word()[0];
            PauliString::with_phase(w, p.phase())
        };
        CliffordTableau {
            x_img: parts.iter().enumerate().map(|(q, t)| lift(q, &t.x_img[0])).collect(),
            z_img: parts.iter().enumerate().map(|(q, t)| lift(q, &t.z_img[0])).collect(),
        }
    }

    /// Qubit permutation mapping qubit `q` to `perm[q]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(invalid("not a permutation"));
            }
            seen[p] = true;
        }
        Ok(CliffordTableau {
            x_img: perm.iter().map(|&p| PauliString::single(n, p, Pauli::X)).collect(),
            z_img: perm.iter().map(|&p| PauliString::single(n, p, Pauli::Z)).collect(),
        })
    }

    /// The 24 single-qubit Cliffords (modulo phase), in a fixed order.
    pub fn single_qubit_group() -> &'static [CliffordTableau] {
        static GROUP: OnceLock<Vec<CliffordTableau>> = OnceLock::new();
        GROUP.get_or_init(|| {
            let gens = [super::gates::h_tableau(), super::gates::s_tableau()];
            let mut seen = HashSet::new();
            let mut out = vec![CliffordTableau::identity(1)];
            seen.insert(out[0].clone());
            let mut frontier = 0;
            while frontier < out.len() {
                let cur = out[frontier].clone();
                for g in &gens {
                    let next = cur.then(g);
                    if seen.insert(next.clone()) {
                        out.push(next);
                    }
                }
                frontier += 1;
            }
            out
        })
    }
}

/// Uniform draw from the 24-element single-qubit Clifford group.
pub fn sample_1q_clifford<R: Rng + ?Sized>(rng: &mut R) -> CliffordTableau {
    let g = CliffordTableau::single_qubit_group();
    g[rng.random_range(0..g.len())].clone()
}

/// `C p C†` via the tableau.
pub fn conjugate_pauli(c: &CliffordTableau, p: &PauliString) -> Result<PauliString> {
    if c.n() != p.n() {
        return Err(Error::DimensionMismatch { expected: c.n(), got: p.n() });
    }
    Ok(c.conjugate(p))
}

fn gf2_inverse(m: &[Vec<bool>]) -> Option<Vec<Vec<bool>>> {
    let k = m.len();
    let mut a: Vec<Vec<bool>> = m.to_vec();
    let mut inv: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| i == j).collect()).collect();
    for col in 0..k {
        let pivot = (col..k).find(|&r| a[r][col])?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        for r in 0..k {
            if r != col && a[r][col] {
                for j in 0..k {
                    a[r][j] ^= a[col][j];
                    inv[r][j] ^= inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

/// `|Tr(A B†)| / d`, equal to 1 iff `A = e^{iθ} B`.
pub fn equal_up_to_phase(a: &Mat, b: &Mat, tol: f64) -> bool {
    let d = a.nrows() as f64;
    let ov: C64 = qop::trace_product(a, &b.adjoint());
    (ov.norm() / d - 1.0).abs() < tol
}
