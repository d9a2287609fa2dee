//! Basis states of the two-ring Hilbert space.
//!
//! A configuration of `2N` three-state sites is stored as a base-3 integer.
//! Slot `k` carries weight `3^k`; the left ring occupies slots `0..N`
//! (site 1 least significant) and the right ring slots `N..2N`. With this
//! ordering the left ring is the fast index, so a state vector reshapes into
//! a `3^N × 3^N` matrix with left-ring rows and right-ring columns.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sparse::BasisTag;

/// Smallest ring for which the junction sites 1 and N are distinct from the
/// interior.
pub const MIN_RING: usize = 3;
/// `3^(2N)` must fit in a `u64`.
pub const MAX_RING: usize = 20;
/// Largest full-space dimension that may be materialized (`3^14`, N = 7).
pub const MAX_FULL_DIM: u64 = 4_782_969;

/// Local state of one site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum SiteState {
    Q0 = 0,
    Q1 = 1,
    /// The hole.
    X = 2,
}

impl SiteState {
    pub fn from_trit(t: u8) -> Option<Self> {
        match t {
            0 => Some(SiteState::Q0),
            1 => Some(SiteState::Q1),
            2 => Some(SiteState::X),
            _ => None,
        }
    }

    #[inline]
    pub fn trit(self) -> u8 {
        self as u8
    }

    pub fn is_hole(self) -> bool {
        self == SiteState::X
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Left,
    Right,
}

impl Ring {
    pub const BOTH: [Ring; 2] = [Ring::Left, Ring::Right];
}

/// `3^k` for `k ≤ 40`.
#[inline]
pub fn pow3(k: usize) -> u64 {
    const TABLE: [u64; 41] = {
        let mut t = [1u64; 41];
        let mut i = 1;
        while i < 41 {
            t[i] = t[i - 1] * 3;
            i += 1;
        }
        t
    };
    TABLE[k]
}

/// Slot of a 1-based ring site.
#[inline]
pub fn slot(n: usize, ring: Ring, site: usize) -> usize {
    debug_assert!((1..=n).contains(&site));
    match ring {
        Ring::Left => site - 1,
        Ring::Right => n + site - 1,
    }
}

/// Trit stored at `slot` of an encoded state.
#[inline]
pub fn digit(index: u64, slot: usize) -> u8 {
    ((index / pow3(slot)) % 3) as u8
}

/// Replace the trit at `slot`.
#[inline]
pub fn with_digit(index: u64, slot: usize, value: u8) -> u64 {
    let w = pow3(slot);
    let old = (index / w) % 3;
    index - old * w + value as u64 * w
}

/// Exchange the trits at two slots.
#[inline]
pub fn swap_digits(index: u64, s1: usize, s2: usize) -> u64 {
    let d1 = digit(index, s1);
    let d2 = digit(index, s2);
    with_digit(with_digit(index, s1, d2), s2, d1)
}

pub fn check_ring_size(n: usize) -> Result<()> {
    if n < MIN_RING {
        return Err(invalid(format!("ring size {n} below minimum {MIN_RING}")));
    }
    if n > MAX_RING {
        return Err(invalid(format!("ring size {n} above maximum {MAX_RING}")));
    }
    Ok(())
}

/// Number of basis states of the full two-ring space.
pub fn full_dimension(n: usize) -> u64 {
    pow3(2 * n)
}

/// One configuration of the `2N` sites.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisState {
    n: usize,
    trits: Vec<SiteState>,
}

impl BasisState {
    pub fn new(n: usize, trits: Vec<SiteState>) -> Result<Self> {
        check_ring_size(n)?;
        if trits.len() != 2 * n {
            return Err(invalid(format!("expected {} sites, got {}", 2 * n, trits.len())));
        }
        Ok(Self { n, trits })
    }

    pub fn from_index(n: usize, index: u64) -> Result<Self> {
        Ok(Self { n, trits: decode(n, index)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trits(&self) -> &[SiteState] {
        &self.trits
    }

    pub fn index(&self) -> u64 {
        encode_unchecked(&self.trits)
    }

    pub fn site(&self, ring: Ring, site: usize) -> SiteState {
        self.trits[slot(self.n, ring, site)]
    }

    pub fn set_site(&mut self, ring: Ring, site: usize, value: SiteState) {
        let s = slot(self.n, ring, site);
        self.trits[s] = value;
    }

    pub fn sector(&self) -> Sector {
        sector_of(self)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = |s: &SiteState| match s {
            SiteState::Q0 => '0',
            SiteState::Q1 => '1',
            SiteState::X => 'x',
        };
        let left: String = self.trits[..self.n].iter().map(sym).collect();
        let right: String = self.trits[self.n..].iter().map(sym).collect();
        write!(f, "L[{left}] R[{right}]")
    }
}

fn encode_unchecked(trits: &[SiteState]) -> u64 {
    trits.iter().rev().fold(0u64, |acc, t| acc * 3 + t.trit() as u64)
}

/// Base-3 index of a configuration of `2n` sites.
pub fn encode(n: usize, trits: &[SiteState]) -> Result<u64> {
    check_ring_size(n)?;
    if trits.len() != 2 * n {
        return Err(invalid(format!("expected {} sites, got {}", 2 * n, trits.len())));
    }
    Ok(encode_unchecked(trits))
}

pub fn decode(n: usize, index: u64) -> Result<Vec<SiteState>> {
    check_ring_size(n)?;
    if index >= full_dimension(n) {
        return Err(invalid(format!("index {index} out of range for N = {n}")));
    }
    let mut rest = index;
    let mut out = Vec::with_capacity(2 * n);
    for _ in 0..2 * n {
        out.push(SiteState::from_trit((rest % 3) as u8).expect("trit"));
        rest /= 3;
    }
    Ok(out)
}

/// Hole counts of the two rings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sector {
    /// Holes in the left ring.
    pub left: usize,
    /// Holes in the right ring.
    pub right: usize,
}

impl Sector {
    pub const fn new(left: usize, right: usize) -> Self {
        Self { left, right }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        check_ring_size(n)?;
        if self.left > n || self.right > n {
            return Err(invalid(format!(
                "sector ({}, {}) out of range for N = {n}",
                self.left, self.right
            )));
        }
        Ok(())
    }

    /// `C(N,a) 2^(N−a) · C(N,b) 2^(N−b)`.
    pub fn dimension(&self, n: usize) -> u64 {
        ring_sector_dimension(n, self.left) * ring_sector_dimension(n, self.right)
    }

    /// All `(a, b)` with `0 ≤ a, b ≤ N`.
    pub fn all(n: usize) -> impl Iterator<Item = Sector> {
        (0..=n).flat_map(move |a| (0..=n).map(move |b| Sector::new(a, b)))
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left, self.right)
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Number of single-ring words with `holes` holes.
pub fn ring_sector_dimension(n: usize, holes: usize) -> u64 {
    if holes > n {
        return 0;
    }
    binomial(n, holes) << (n - holes)
}

/// All single-ring words (ring-local base-3 codes, site 1 least
/// significant) with exactly `holes` holes, ascending.
pub fn ring_words(n: usize, holes: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(ring_sector_dimension(n, holes) as usize);
    fn rec(n: usize, pos: usize, holes_left: usize, acc: u64, out: &mut Vec<u64>) {
        if pos == n {
            if holes_left == 0 {
                out.push(acc);
            }
            return;
        }
        let remaining = n - pos;
        let w = pow3(pos);
        if remaining > holes_left {
            rec(n, pos + 1, holes_left, acc, out);
            rec(n, pos + 1, holes_left, acc + w, out);
        }
        if holes_left > 0 {
            rec(n, pos + 1, holes_left - 1, acc + 2 * w, out);
        }
    }
    rec(n, 0, holes, 0, &mut out);
    out.sort_unstable();
    out
}

/// Strictly increasing indices of all states in a sector.
pub fn enumerate_sector(n: usize, sector: Sector) -> Result<Vec<u64>> {
    sector.validate(n)?;
    let left = ring_words(n, sector.left);
    let right = ring_words(n, sector.right);
    let shift = pow3(n);
    let mut out = Vec::with_capacity(left.len() * right.len());
    for r in &right {
        out.extend(left.iter().map(|l| l + r * shift));
    }
    Ok(out)
}

/// Hole count of one ring of an encoded state.
pub fn holes_in(n: usize, index: u64, ring: Ring) -> usize {
    (1..=n).filter(|&i| digit(index, slot(n, ring, i)) == 2).count()
}

pub fn sector_of_index(n: usize, index: u64) -> Sector {
    Sector::new(holes_in(n, index, Ring::Left), holes_in(n, index, Ring::Right))
}

pub fn sector_of(state: &BasisState) -> Sector {
    let n = state.n;
    let count = |r: &[SiteState]| r.iter().filter(|s| s.is_hole()).count();
    Sector::new(count(&state.trits[..n]), count(&state.trits[n..]))
}

/// An ordered set of basis states over which operators are assembled.
#[derive(Clone, Debug)]
pub enum Basis {
    /// Every state; position equals index.
    Full { n: usize },
    /// A materialized, strictly increasing list with a position lookup.
    Listed {
        n: usize,
        tag: BasisTag,
        states: Vec<u64>,
        lookup: HashMap<u64, u32>,
    },
}

impl Basis {
    pub fn full(n: usize) -> Result<Self> {
        check_ring_size(n)?;
        if full_dimension(n) > MAX_FULL_DIM {
            return Err(Error::Capacity(format!(
                "full space of N = {n} has dimension {}; restrict to a sector or an effective class",
                full_dimension(n)
            )));
        }
        Ok(Basis::Full { n })
    }

    pub fn sector(n: usize, sector: Sector) -> Result<Self> {
        let states = enumerate_sector(n, sector)?;
        Self::listed(n, BasisTag::Sector(sector), states)
    }

    /// Arbitrary list of states; sorted and deduplicated here.
    pub fn listed(n: usize, tag: BasisTag, mut states: Vec<u64>) -> Result<Self> {
        check_ring_size(n)?;
        states.sort_unstable();
        states.dedup();
        if states.len() > u32::MAX as usize {
            return Err(Error::Capacity(format!("{} basis states", states.len())));
        }
        if let Some(&last) = states.last() {
            if last >= full_dimension(n) {
                return Err(invalid(format!("state {last} out of range for N = {n}")));
            }
        }
        let lookup = states.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();
        Ok(Basis::Listed { n, tag, states, lookup })
    }

    pub fn n(&self) -> usize {
        match self {
            Basis::Full { n } | Basis::Listed { n, .. } => *n,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::Full { n } => full_dimension(*n) as usize,
            Basis::Listed { states, .. } => states.len(),
        }
    }

    #[inline]
    pub fn state(&self, pos: usize) -> u64 {
        match self {
            Basis::Full { .. } => pos as u64,
            Basis::Listed { states, .. } => states[pos],
        }
    }

    #[inline]
    pub fn position(&self, index: u64) -> Option<usize> {
        match self {
            Basis::Full { n } => (index < full_dimension(*n)).then_some(index as usize),
            Basis::Listed { lookup, .. } => lookup.get(&index).map(|&p| p as usize),
        }
    }

    pub fn tag(&self) -> BasisTag {
        match self {
            Basis::Full { .. } => BasisTag::Full,
            Basis::Listed { tag, .. } => tag.clone(),
        }
    }

    /// Dense vector over this basis from `(index, amplitude)` pairs. Indices
    /// outside the basis are an error.
    pub fn densify(&self, amplitudes: &[(u64, f64)]) -> Result<Vec<f64>> {
        let mut v = vec![0.0; self.dim()];
        for &(idx, amp) in amplitudes {
            let p = self
                .position(idx)
                .ok_or_else(|| invalid(format!("state {idx} not in basis")))?;
            v[p] += amp;
        }
        Ok(v)
    }
}
