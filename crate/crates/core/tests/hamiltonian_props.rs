mod common;

use proptest::prelude::*;

use ringgap::hamiltonian::{assemble, brick_permutation, build_term, sector_hamiltonian};
use ringgap::hilbert::{decode, encode, enumerate_sector, sector_of_index};
use ringgap::{Basis, ModelParams, Sector, TermKind};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sector_blocks_are_exactly_symmetric(v1 in 0.0f64..2.0, v2 in 0.0f64..2.0, a in 0usize..=3, b in 0usize..=3) {
        let params = ModelParams::with_potentials(3, v1, v2);
        let h = sector_hamiltonian(&params, Sector::new(a, b)).unwrap();
        prop_assert!(h.is_symmetric());
        let d = h.to_dense();
        prop_assert_eq!(d.transpose(), d);
    }

    #[test]
    fn terms_are_positive_semidefinite(v1 in 0.0f64..2.0, v2 in 0.0f64..2.0, a in 0usize..=3, b in 0usize..=3) {
        let params = ModelParams::with_potentials(3, v1, v2);
        let basis = Basis::sector(3, Sector::new(a, b)).unwrap();
        // H_V carries a constant shift and is not PSD on its own.
        for kind in [TermKind::LeftHop, TermKind::RightHop, TermKind::JunctionHop, TermKind::SingletPenalty] {
            let t = build_term(kind, &params, &basis).unwrap();
            let low = common::sorted_eigenvalues(t.to_dense())[0];
            prop_assert!(low >= -1e-12, "{:?} in ({}, {}): {}", kind, a, b, low);
        }
    }

    #[test]
    fn every_image_stays_in_its_sector(raw in any::<u64>()) {
        let n = 3;
        let index = raw % 3u64.pow(6);
        let sector = sector_of_index(n, index);
        let states = enumerate_sector(n, sector).unwrap();
        prop_assert!(states.binary_search(&index).is_ok());
        prop_assert_eq!(encode(n, &decode(n, index).unwrap()).unwrap(), index);
    }
}

#[test]
fn brick_chain_terms_are_nearest_neighbour() {
    for n in [4, 6] {
        let map = brick_permutation(n).unwrap();
        assert_eq!(map.max_term_span(), 1, "N={n}");
        let mut slots = map.slot_permutation();
        slots.sort();
        assert_eq!(slots, (0..2 * n).collect::<Vec<_>>());
    }
}

#[test]
fn full_operator_matches_sector_blocks_at_three() {
    let params = ModelParams::new(3);
    let full = assemble(&params, &Basis::full(3).unwrap()).unwrap();
    for sector in Sector::all(3) {
        let states = enumerate_sector(3, sector).unwrap();
        let h = sector_hamiltonian(&params, sector).unwrap();
        for (i, &s) in states.iter().enumerate() {
            for (j, &t) in states.iter().enumerate() {
                assert_eq!(h.get(i, j), full.get(s as usize, t as usize));
            }
        }
    }
}
