// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

use nmrqip::clifford::CliffordTableau;
use nmrqip::clifford::twirl::random_twirl;
use nmrqip::noise::Channel;
use nmrqip::qop::{self, max_abs_diff, partial_trace, random_density, random_unitary, tensor};
use nmrqip::{Pauli, PauliString};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(0u8..4, n), 0u8..4).prop_map(|(w, ph)| {
        let word = w.into_iter().map(|k| Pauli::from_bits(k & 1 == 1, k & 2 == 2)).collect();
        PauliString::with_phase(word, ph)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_product_matches_dense(a in pauli_string(3), b in pauli_string(3)) {
        let sym = a.mul(&b).dense();
        let den = a.dense() * b.dense();
        prop_assert!(max_abs_diff(&sym, &den) < 1e-14);
    }

    #[test]
    fn pauli_strings_parse_back(p in pauli_string(4)) {
        let text = p.to_string();
        let back: PauliString = text.parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn unitary_conjugation_keeps_trace(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 1 << n;
        let rho = random_density(d, &mut rng);
        let u = random_unitary(d, &mut rng);
        let out = qop::conjugate(&rho, &u);
        prop_assert!((out.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density(2, &mut rng);
        let b = random_density(4, &mut rng);
        let pa = partial_trace(&tensor(&a, &b), &[0]).unwrap();
        let pb = partial_trace(&tensor(&a, &b), &[1, 2]).unwrap();
        prop_assert!(max_abs_diff(&pa, &a) < 1e-12);
        prop_assert!(max_abs_diff(&pb, &b) < 1e-12);
    }

    #[test]
    fn channels_preserve_trace(seed in any::<u64>(), p in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(4, &mut rng);
        let channels = [
            Channel::depolarizing(2, p).unwrap(),
            Channel::bit_flip(2, 1, p).unwrap(),
            Channel::phase_flip(2, 0, p).unwrap(),
            Channel::unitary(random_unitary(4, &mut rng)).unwrap(),
        ];
        for ch in &channels {
            let out = ch.apply(&rho).unwrap();
            prop_assert!((out.trace().re - 1.0).abs() < 1e-10);
            prop_assert!(out.trace().im.abs() < 1e-10);
        }
    }

    #[test]
    fn tableau_inverse_and_dense(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_twirl(2, &mut rng);
        let id = CliffordTableau::identity(2);
        prop_assert_eq!(&c.then(&c.inverse()), &id);
        let back = CliffordTableau::from_dense(&c.to_dense()).unwrap();
        prop_assert_eq!(&back, &c);
        for p in PauliString::all(2) {
            let image = c.conjugate(&p);
            let u = c.to_dense();
            let dense = &u * p.dense() * u.adjoint();
            prop_assert!(max_abs_diff(&image.dense(), &dense) < 1e-12);
        }
    }
}
