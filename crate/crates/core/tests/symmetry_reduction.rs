mod common;

use proptest::prelude::*;

use ringgap::hamiltonian::build_term;
use ringgap::symmetry::{
    build_effective, class_of, embed_node, necklace_classes, BellIndex, ClassSignature, GraphNode,
};
use ringgap::{Basis, ModelParams, Sector, TermKind};

fn bells_from_code(len: usize, code: u64) -> Vec<BellIndex> {
    (0..len).map(|i| BellIndex::ALL[((code >> (2 * i)) & 3) as usize]).collect()
}

#[test]
fn class_dimensions_fill_sector_one_one() {
    for n in 3..=6 {
        let total: usize = necklace_classes(n).unwrap().iter().map(|c| c.dim()).sum();
        let expected = n * n * 4usize.pow(n as u32 - 1);
        assert_eq!(total, expected, "N={n}");
        assert_eq!(Sector::new(1, 1).dimension(n) as usize, expected, "N={n}");
    }
}

#[test]
fn effective_kernel_exists_only_without_penalties() {
    for n in 3..=5 {
        for class in necklace_classes(n).unwrap() {
            let h = build_effective(&class.signature()).unwrap();
            let values = common::sorted_eigenvalues(h.to_dense());
            assert!(values[0] >= -1e-12, "N={n} {:?}: {}", class.canonical, values[0]);
            let has_kernel = values[0].abs() < 1e-10;
            assert_eq!(has_kernel, class.bad_set.is_empty(), "N={n} {:?}: λ0={}", class.canonical, values[0]);
        }
    }
}

#[test]
fn singlet_penalty_is_one_on_bad_front_pairs() {
    for n in [3, 4] {
        let params = ModelParams::new(n);
        let basis = Basis::sector(n, Sector::new(1, 1)).unwrap();
        let hp = build_term(TermKind::SingletPenalty, &params, &basis).unwrap();
        for class in necklace_classes(n).unwrap() {
            for r in 0..class.period {
                let node = GraphNode::new(n, n, r);
                let psi = basis.densify(&embed_node(&class, node).unwrap()).unwrap();
                let e = hp.quad_form(&psi);
                // With both holes at site N the junction pair is the list's front.
                let expected = if class.shifted(r)[0].is_singlet() { 0.0 } else { 1.0 };
                assert!((e - expected).abs() < 1e-12, "N={n} {:?} r={r}: {e}", class.bells);
                assert_eq!(class.bad_set.contains(&r), expected == 1.0);
            }
        }
    }
}

#[test]
fn effective_operator_depends_on_signature_only() {
    let n = 5;
    let by_sig = |sig: &ClassSignature| build_effective(sig).unwrap().to_dense();
    let classes = necklace_classes(n).unwrap();
    for c in &classes {
        let twin = classes.iter().find(|d| d.canonical != c.canonical && d.signature() == c.signature());
        if let Some(d) = twin {
            assert_eq!(by_sig(&c.signature()), by_sig(&d.signature()));
        }
    }
}

proptest! {
    #[test]
    fn shift_convention_front_pair(len in 2usize..=8, code in any::<u64>(), r in 0usize..16) {
        let code = code & ((1u64 << (2 * len)) - 1);
        let bells = bells_from_code(len, code);
        let class = class_of(&bells).unwrap();
        let rr = r % class.period;
        // After r shifts the front pair is α_{r+1}.
        prop_assert_eq!(class.shifted(rr)[0], bells[rr % len]);
        prop_assert_eq!(class.bad_set.contains(&rr), !bells[rr % len].is_singlet());
        prop_assert_eq!(len % class.period, 0);
        prop_assert_eq!(class.shifted(class.period), bells.clone());
    }

    #[test]
    fn canonical_is_smallest_rotation(len in 2usize..=8, code in any::<u64>()) {
        let code = code & ((1u64 << (2 * len)) - 1);
        let bells = bells_from_code(len, code);
        let class = class_of(&bells).unwrap();
        for r in 0..len {
            let rot: Vec<BellIndex> = (0..len).map(|i| bells[(i + r) % len]).collect();
            prop_assert!(class.canonical <= rot);
            prop_assert_eq!(class_of(&rot).unwrap().canonical, class.canonical.clone());
        }
    }

    #[test]
    fn graph_index_round_trip(n in 3usize..=40, p in 1usize..=6, raw in any::<usize>()) {
        let idx = raw % (p * n * n);
        let node = GraphNode::from_index(n, idx);
        prop_assert!(node.a >= 1 && node.a <= n && node.b >= 1 && node.b <= n && node.r < p);
        prop_assert_eq!(node.index(n), idx);
    }
}
