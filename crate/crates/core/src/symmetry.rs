//! Invariant subspaces of the one-hole-per-ring sector.
//!
//! With one hole in each ring the `N − 1` qubit pairs `(L_i, R_i)` carry a
//! list of Bell states `{α_i}`. Hole motion only shifts this list cyclically,
//! so each cyclic-equivalence class spans an invariant subspace whose states
//! `|a, b, r⟩ = M_{a,b} R^r |{α_i}⟩` form the nodes of `p` chained `N × N`
//! grids. The operator on those nodes depends on the class only through its
//! period `p` and the set of shifts whose front pair is not the singlet.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{check_ring_size, pow3, slot, swap_digits, Ring};
use crate::sparse::{BasisTag, SparseOperator};

/// Largest `N` for which all `4^{N−1}` Bell lists are enumerated.
pub const MAX_ENUM_RING: usize = 9;

/// The four real Bell states on a pair `(L_i, R_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BellIndex {
    /// `(|01⟩ − |10⟩)/√2`
    PsiMinus = 0,
    /// `(|01⟩ + |10⟩)/√2`
    PsiPlus = 1,
    /// `(|00⟩ + |11⟩)/√2`
    PhiPlus = 2,
    /// `(|00⟩ − |11⟩)/√2`
    PhiMinus = 3,
}

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [BellIndex::PsiMinus, BellIndex::PsiPlus, BellIndex::PhiPlus, BellIndex::PhiMinus];

    pub fn from_index(i: u8) -> Option<Self> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn is_singlet(self) -> bool {
        self == BellIndex::PsiMinus
    }

    /// Nonzero components `(left qubit, right qubit, amplitude)`.
    pub fn amplitudes(self) -> [(u8, u8, f64); 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellIndex::PsiMinus => [(0, 1, h), (1, 0, -h)],
            BellIndex::PsiPlus => [(0, 1, h), (1, 0, h)],
            BellIndex::PhiPlus => [(0, 0, h), (1, 1, h)],
            BellIndex::PhiMinus => [(0, 0, h), (1, 1, -h)],
        }
    }
}

impl fmt::Display for BellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellIndex::PsiMinus => "psi-",
            BellIndex::PsiPlus => "psi+",
            BellIndex::PhiPlus => "phi+",
            BellIndex::PhiMinus => "phi-",
        })
    }
}

/// What the effective operator needs to know about a class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassSignature {
    pub n: usize,
    pub period: usize,
    /// Shifts `r ∈ [0, p)` whose front pair is not the singlet.
    pub bad_set: BTreeSet<usize>,
}

impl ClassSignature {
    pub fn new(n: usize, period: usize, bad_set: impl IntoIterator<Item = usize>) -> Result<Self> {
        let sig = Self { n, period, bad_set: bad_set.into_iter().collect() };
        sig.validate()?;
        Ok(sig)
    }

    /// The all-singlet class, `p = 1`, no penalties.
    pub fn singlet(n: usize) -> Self {
        Self { n, period: 1, bad_set: BTreeSet::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid(format!("ring size {} too small for a Bell list", self.n)));
        }
        if self.period == 0 || (self.n - 1) % self.period != 0 {
            return Err(invalid(format!("period {} does not divide N − 1 = {}", self.period, self.n - 1)));
        }
        if let Some(&r) = self.bad_set.iter().find(|&&r| r >= self.period) {
            return Err(invalid(format!("bad shift {r} outside [0, {})", self.period)));
        }
        Ok(())
    }

    /// Node count `p·N²`.
    pub fn dim(&self) -> usize {
        self.period * self.n * self.n
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag::Effective { period: self.period, bad_set: self.bad_set.iter().copied().collect() }
    }
}

/// A cyclic-equivalence class of Bell lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecklaceClass {
    pub n: usize,
    /// The list labelling the nodes; shift `r` refers to this list.
    pub bells: Vec<BellIndex>,
    /// Lexicographically smallest rotation.
    pub canonical: Vec<BellIndex>,
    pub period: usize,
    pub bad_set: BTreeSet<usize>,
}

impl NecklaceClass {
    pub fn signature(&self) -> ClassSignature {
        ClassSignature { n: self.n, period: self.period, bad_set: self.bad_set.clone() }
    }

    /// `R^r` applied to the reference list: entry `i` is `α_{i+r}`.
    pub fn shifted(&self, r: usize) -> Vec<BellIndex> {
        let len = self.bells.len();
        (0..len).map(|i| self.bells[(i + r) % len]).collect()
    }

    pub fn dim(&self) -> usize {
        self.period * self.n * self.n
    }
}

fn rotate(list: &[BellIndex], r: usize) -> Vec<BellIndex> {
    let len = list.len();
    (0..len).map(|i| list[(i + r) % len]).collect()
}

/// Class of a Bell list of length `N − 1`, labelled by that list itself.
pub fn class_of(bells: &[BellIndex]) -> Result<NecklaceClass> {
    if bells.is_empty() {
        return Err(invalid("a Bell list needs at least one entry"));
    }
    let len = bells.len();
    let period = (1..=len).find(|&p| len % p == 0 && rotate(bells, p) == bells).unwrap_or(len);
    let canonical = (0..period).map(|r| rotate(bells, r)).min().unwrap_or_default();
    let bad_set = (0..period).filter(|&r| !bells[r % len].is_singlet()).collect();
    Ok(NecklaceClass { n: len + 1, bells: bells.to_vec(), canonical, period, bad_set })
}

/// One class per cyclic orbit of the `4^{N−1}` Bell lists, labelled by its
/// canonical list, sorted by that list.
pub fn necklace_classes(n: usize) -> Result<Vec<NecklaceClass>> {
    if n < 2 {
        return Err(invalid(format!("ring size {n} too small for a Bell list")));
    }
    if n > MAX_ENUM_RING {
        return Err(Error::Capacity(format!(
            "enumerating 4^{} Bell lists exceeds the N ≤ {MAX_ENUM_RING} guard; scan (p, bad_set) signatures instead",
            n - 1
        )));
    }
    let len = n - 1;
    let mut out = Vec::new();
    for code in 0..4usize.pow(len as u32) {
        let list: Vec<BellIndex> = (0..len).map(|i| BellIndex::ALL[(code >> (2 * i)) & 3]).collect();
        let class = class_of(&list)?;
        if class.canonical == list {
            out.push(class);
        }
    }
    out.sort_by(|x, y| x.canonical.cmp(&y.canonical));
    Ok(out)
}

/// A node `|a, b, r⟩` of the effective graph; `a`, `b` are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphNode {
    pub a: usize,
    pub b: usize,
    pub r: usize,
}

impl GraphNode {
    pub fn new(a: usize, b: usize, r: usize) -> Self {
        Self { a, b, r }
    }

    /// Position `r·N² + (a−1)·N + (b−1)`.
    pub fn index(&self, n: usize) -> usize {
        self.r * n * n + (self.a - 1) * n + (self.b - 1)
    }

    pub fn from_index(n: usize, idx: usize) -> Self {
        Self { a: (idx % (n * n)) / n + 1, b: idx % n + 1, r: idx / (n * n) }
    }

    fn validate(&self, n: usize, period: usize) -> Result<()> {
        if !(1..=n).contains(&self.a) || !(1..=n).contains(&self.b) || self.r >= period {
            return Err(invalid(format!("node {self:?} outside N = {n}, p = {period}")));
        }
        Ok(())
    }
}

/// Move the hole of `ring` from site `N` to site `a` by adjacent swaps,
/// pushing the qubits at `a..N−1` one site up.
fn shift_hole(n: usize, ring: Ring, a: usize, index: u64) -> u64 {
    (a..n).rev().fold(index, |idx, i| swap_digits(idx, slot(n, ring, i), slot(n, ring, i + 1)))
}

/// `M_{a,b} R^r |{α_i}⟩` in the computational basis, as `(index, amplitude)`
/// sorted by index.
pub fn embed_node(class: &NecklaceClass, node: GraphNode) -> Result<Vec<(u64, f64)>> {
    let n = class.n;
    check_ring_size(n)?;
    node.validate(n, class.period)?;
    let list = class.shifted(node.r);
    let holes = 2 * pow3(slot(n, Ring::Left, n)) + 2 * pow3(slot(n, Ring::Right, n));
    let mut out = Vec::with_capacity(1 << (n - 1));
    for choice in 0..1u64 << (n - 1) {
        let mut index = holes;
        let mut amp = 1.0;
        for (i, bell) in list.iter().enumerate() {
            let (l, r, c) = bell.amplitudes()[((choice >> i) & 1) as usize];
            index += l as u64 * pow3(slot(n, Ring::Left, i + 1)) + r as u64 * pow3(slot(n, Ring::Right, i + 1));
            amp *= c;
        }
        let index = shift_hole(n, Ring::Right, node.b, shift_hole(n, Ring::Left, node.a, index));
        out.push((index, amp));
    }
    out.sort_by_key(|&(i, _)| i);
    Ok(out)
}

/// `H_L + H_R + H_B + H_P` on the `p·N²` nodes of a class.
pub fn build_effective(sig: &ClassSignature) -> Result<SparseOperator> {
    sig.validate()?;
    let n = sig.n;
    let p = sig.period;
    let node = |a: usize, b: usize, r: usize| GraphNode::new(a, b, r).index(n) as u32;
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); sig.dim()];
    for r in 0..p {
        let bad = sig.bad_set.contains(&r);
        for a in 1..=n {
            for b in 1..=n {
                let here = node(a, b, r) as usize;
                let row = &mut rows[here];
                // Path Laplacian in a and in b.
                for (x, step) in [(a, 0), (b, 1)] {
                    if x > 1 {
                        row.push((here as u32, 1.0));
                        row.push((if step == 0 { node(a - 1, b, r) } else { node(a, b - 1, r) }, -1.0));
                    }
                    if x < n {
                        row.push((here as u32, 1.0));
                        row.push((if step == 0 { node(a + 1, b, r) } else { node(a, b + 1, r) }, -1.0));
                    }
                }
                if a == n && b == n {
                    row.push((here as u32, 1.0));
                    row.push((node(1, 1, (r + 1) % p), -1.0));
                }
                if a == 1 && b == 1 {
                    row.push((here as u32, 1.0));
                    row.push((node(n, n, (r + p - 1) % p), -1.0));
                }
                if bad && a > 1 && b > 1 {
                    row.push((here as u32, 1.0));
                }
            }
        }
    }
    SparseOperator::from_rows(sig.dim(), sig.tag(), rows)
}

/// The walk alone, without the singlet penalty.
pub fn build_walk(n: usize, period: usize) -> Result<SparseOperator> {
    build_effective(&ClassSignature::new(n, period, [])?)
}

#[derive(Serialize)]
struct CatalogLine<'a> {
    #[serde(rename = "N")]
    n: usize,
    representative: String,
    p: usize,
    bad_set: &'a BTreeSet<usize>,
    dim: usize,
}

/// One JSON object per class: `{N, representative, p, bad_set, dim}`.
pub fn write_catalog<W: Write>(classes: &[NecklaceClass], mut w: W) -> Result<()> {
    for c in classes {
        let line = CatalogLine {
            n: c.n,
            representative: c.bells.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","),
            p: c.period,
            bad_set: &c.bad_set,
            dim: c.dim(),
        };
        serde_json::to_writer(&mut w, &line)?;
        writeln!(w)?;
    }
    Ok(())
}
