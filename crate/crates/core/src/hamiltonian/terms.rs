//! Local rules of the individual Hamiltonian terms.
//!
//! Each rule maps one basis state `|s⟩` to `H_term |s⟩ = Σ_t c_t |t⟩`. All
//! coefficients are real; the singlet is `(|01⟩ − |10⟩)/√2`.

use crate::hilbert::{digit, slot, swap_digits, Ring};

use super::{ModelParams, TermKind};

const HOLE: u8 = 2;

/// One summand of the Hamiltonian, acting on a handful of sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalTerm {
    /// `|x⟩_i⟨x| + |x⟩_{i+1}⟨x| − F_i − F_i†` for `1 ≤ i < N`.
    Hop { ring: Ring, site: usize },
    /// `|xx⟩_N⟨xx| + |xx⟩_1⟨xx| − F_N^L F_N^R − h.c.`
    JunctionHop,
    /// `(I − n_1^L)(I − n_1^R) − |Ψ⁻⟩_1⟨Ψ⁻|`.
    SingletPenalty,
    /// The constant `V1` of one ring.
    HoleOffset { ring: Ring },
    /// `−V1 |x⟩_i⟨x|`.
    HoleBonus { ring: Ring, site: usize },
    /// `V2 |xx⟩_{i,i+1}⟨xx|`, with `N + 1 ≡ 1`.
    AdjacentHoles { ring: Ring, site: usize },
}

impl LocalTerm {
    pub fn kind(&self) -> TermKind {
        match self {
            LocalTerm::Hop { ring: Ring::Left, .. } => TermKind::LeftHop,
            LocalTerm::Hop { ring: Ring::Right, .. } => TermKind::RightHop,
            LocalTerm::JunctionHop => TermKind::JunctionHop,
            LocalTerm::SingletPenalty => TermKind::SingletPenalty,
            LocalTerm::HoleOffset { .. }
            | LocalTerm::HoleBonus { .. }
            | LocalTerm::AdjacentHoles { .. } => TermKind::HolePotential,
        }
    }

    /// Ring the term lives on, `None` for the junction terms.
    pub fn ring(&self) -> Option<Ring> {
        match *self {
            LocalTerm::Hop { ring, .. }
            | LocalTerm::HoleOffset { ring }
            | LocalTerm::HoleBonus { ring, .. }
            | LocalTerm::AdjacentHoles { ring, .. } => Some(ring),
            LocalTerm::JunctionHop | LocalTerm::SingletPenalty => None,
        }
    }

    /// Slots the term reads or writes.
    pub fn support(&self, n: usize) -> Vec<usize> {
        match *self {
            LocalTerm::Hop { ring, site } => vec![slot(n, ring, site), slot(n, ring, site + 1)],
            LocalTerm::JunctionHop => vec![
                slot(n, Ring::Left, 1),
                slot(n, Ring::Left, n),
                slot(n, Ring::Right, 1),
                slot(n, Ring::Right, n),
            ],
            LocalTerm::SingletPenalty => vec![slot(n, Ring::Left, 1), slot(n, Ring::Right, 1)],
            LocalTerm::HoleOffset { .. } => Vec::new(),
            LocalTerm::HoleBonus { ring, site } => vec![slot(n, ring, site)],
            LocalTerm::AdjacentHoles { ring, site } => {
                vec![slot(n, ring, site), slot(n, ring, site % n + 1)]
            }
        }
    }

    /// Emit `H_term |index⟩`, one `(target, coefficient)` at a time.
    #[inline]
    pub fn apply(&self, params: &ModelParams, index: u64, emit: &mut impl FnMut(u64, f64)) {
        let n = params.n;
        match *self {
            LocalTerm::Hop { ring, site } => {
                let (s1, s2) = (slot(n, ring, site), slot(n, ring, site + 1));
                // Two holes swap into the same state and cancel the penalty.
                if (digit(index, s1) == HOLE) != (digit(index, s2) == HOLE) {
                    emit(index, 1.0);
                    emit(swap_digits(index, s1, s2), -1.0);
                }
            }
            LocalTerm::JunctionHop => {
                let l1 = slot(n, Ring::Left, 1);
                let ln = slot(n, Ring::Left, n);
                let r1 = slot(n, Ring::Right, 1);
                let rn = slot(n, Ring::Right, n);
                let both_at = |a: usize, b: usize| digit(index, a) == HOLE && digit(index, b) == HOLE;
                let hop = || swap_digits(swap_digits(index, ln, l1), rn, r1);
                if both_at(ln, rn) {
                    emit(index, 1.0);
                    emit(hop(), -1.0);
                }
                if both_at(l1, r1) {
                    emit(index, 1.0);
                    emit(hop(), -1.0);
                }
            }
            LocalTerm::SingletPenalty => {
                let l1 = slot(n, Ring::Left, 1);
                let r1 = slot(n, Ring::Right, 1);
                let (ql, qr) = (digit(index, l1), digit(index, r1));
                if ql != HOLE && qr != HOLE {
                    if ql == qr {
                        emit(index, 1.0);
                    } else {
                        emit(index, 0.5);
                        emit(swap_digits(index, l1, r1), 0.5);
                    }
                }
            }
            LocalTerm::HoleOffset { .. } => emit(index, params.v1),
            LocalTerm::HoleBonus { ring, site } => {
                if digit(index, slot(n, ring, site)) == HOLE {
                    emit(index, -params.v1);
                }
            }
            LocalTerm::AdjacentHoles { ring, site } => {
                let s1 = slot(n, ring, site);
                let s2 = slot(n, ring, site % n + 1);
                if digit(index, s1) == HOLE && digit(index, s2) == HOLE {
                    emit(index, params.v2);
                }
            }
        }
    }
}

/// All local terms making up one term of the Hamiltonian.
pub fn local_terms(kind: TermKind, n: usize) -> Vec<LocalTerm> {
    match kind {
        TermKind::LeftHop => (1..n).map(|site| LocalTerm::Hop { ring: Ring::Left, site }).collect(),
        TermKind::RightHop => (1..n).map(|site| LocalTerm::Hop { ring: Ring::Right, site }).collect(),
        TermKind::JunctionHop => vec![LocalTerm::JunctionHop],
        TermKind::SingletPenalty => vec![LocalTerm::SingletPenalty],
        TermKind::HolePotential => Ring::BOTH.iter().flat_map(|&r| ring_potential(r, n)).collect(),
    }
}

/// `H_V` of a single ring.
pub fn ring_potential(ring: Ring, n: usize) -> Vec<LocalTerm> {
    std::iter::once(LocalTerm::HoleOffset { ring })
        .chain((1..=n).map(move |site| LocalTerm::HoleBonus { ring, site }))
        .chain((1..=n).map(move |site| LocalTerm::AdjacentHoles { ring, site }))
        .collect()
}

/// Every local term of `H`.
pub fn all_terms(n: usize) -> Vec<LocalTerm> {
    TermKind::ALL.iter().flat_map(|&k| local_terms(k, n)).collect()
}
