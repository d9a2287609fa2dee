//! Folding the two rings into a chain of `N` nine-state sites.
//!
//! Each ring is folded so that sites `i` and `N + 1 − i` share a column. The
//! left ring fills columns `1..=N/2` with its `(1, N)` column last; the right
//! ring fills `N/2 + 1..=N` with its `(1, N)` column first, so the junction
//! terms touch two neighbouring columns. Within a column the lower site index
//! is on top.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::hilbert::{digit, pow3, slot, with_digit, Ring};
use crate::sparse::{BasisTag, SparseOperator};

use super::{all_terms, LocalTerm, ModelParams};

/// Placement of every original slot on the nine-state chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrickMap {
    n: usize,
    /// 0-based chain column per slot.
    column: Vec<usize>,
    /// 0 = top, 1 = bottom, per slot.
    layer: Vec<usize>,
}

pub fn brick_permutation(n: usize) -> Result<BrickMap> {
    if n % 2 != 0 {
        return Err(Error::Unsupported(format!("brick folding needs an even ring size, got {n}")));
    }
    if n < 4 {
        return Err(invalid(format!("brick folding needs N ≥ 4, got {n}")));
    }
    let half = n / 2;
    let mut column = vec![0; 2 * n];
    let mut layer = vec![0; 2 * n];
    for c in 1..=half {
        // Left ring: column c holds sites (N/2 + 1 − c, N/2 + c).
        let (top, bottom) = (half + 1 - c, half + c);
        column[slot(n, Ring::Left, top)] = c - 1;
        column[slot(n, Ring::Left, bottom)] = c - 1;
        layer[slot(n, Ring::Left, bottom)] = 1;
        // Right ring: column N/2 + c holds sites (c, N + 1 − c).
        let (top, bottom) = (c, n + 1 - c);
        column[slot(n, Ring::Right, top)] = half + c - 1;
        column[slot(n, Ring::Right, bottom)] = half + c - 1;
        layer[slot(n, Ring::Right, bottom)] = 1;
    }
    Ok(BrickMap { n, column, layer })
}

impl BrickMap {
    pub fn n(&self) -> usize {
        self.n
    }

    /// 0-based chain column of a slot.
    pub fn column(&self, slot: usize) -> usize {
        self.column[slot]
    }

    pub fn layer(&self, slot: usize) -> usize {
        self.layer[slot]
    }

    /// Trit position of a slot in the chain encoding, where column `j` has
    /// nine-state value `top + 3·bottom` and weight `9^j`.
    pub fn chain_slot(&self, slot: usize) -> usize {
        2 * self.column[slot] + self.layer[slot]
    }

    /// Permutation of trit slots, `perm[slot] = chain_slot`.
    pub fn slot_permutation(&self) -> Vec<usize> {
        (0..2 * self.n).map(|s| self.chain_slot(s)).collect()
    }

    /// Chain index of an original basis state.
    pub fn chain_index(&self, index: u64) -> u64 {
        (0..2 * self.n).map(|s| digit(index, s) as u64 * pow3(self.chain_slot(s))).sum()
    }

    /// Columns spanned by a term's support, `None` for a constant.
    pub fn columns_of(&self, term: &LocalTerm) -> Option<(usize, usize)> {
        let cols: Vec<usize> = term.support(self.n).iter().map(|&s| self.column[s]).collect();
        Some((*cols.iter().min()?, *cols.iter().max()?))
    }

    /// Largest column distance spanned by any term of `H`.
    pub fn max_term_span(&self) -> usize {
        all_terms(self.n)
            .iter()
            .filter_map(|t| self.columns_of(t))
            .map(|(lo, hi)| hi - lo)
            .max()
            .unwrap_or(0)
    }
}

/// `H` written as on-site and nearest-neighbour terms of the nine-state chain.
#[derive(Clone, Debug)]
pub struct ChainHamiltonian {
    n: usize,
    constant: f64,
    /// 9×9 operator per column.
    sites: Vec<DMatrix<f64>>,
    /// 81×81 operator on columns `(j, j+1)`, local index `v_j + 9·v_{j+1}`.
    bonds: Vec<DMatrix<f64>>,
}

/// Nine-state value of column `j` of a chain index.
#[inline]
fn digit9(index: u64, j: usize) -> usize {
    ((index / 9u64.pow(j as u32)) % 9) as usize
}

#[inline]
fn with_digit9(index: u64, j: usize, value: usize) -> u64 {
    let w = 9u64.pow(j as u32);
    index - ((index / w) % 9) * w + value as u64 * w
}

impl ChainHamiltonian {
    /// Group every local term of `H` into on-site and bond operators. Fails
    /// if a term spans more than two neighbouring columns or reads sites
    /// outside its declared support.
    pub fn new(map: &BrickMap, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let n = map.n;
        if params.n != n {
            return Err(invalid("brick map and params disagree on N"));
        }
        let mut out = Self {
            n,
            constant: 0.0,
            sites: vec![DMatrix::zeros(9, 9); n],
            bonds: vec![DMatrix::zeros(81, 81); n - 1],
        };
        for term in all_terms(n) {
            let Some((lo, hi)) = map.columns_of(&term) else {
                let mut c = 0.0;
                term.apply(params, 0, &mut |t, v| {
                    debug_assert_eq!(t, 0);
                    c += v
                });
                out.constant += c;
                continue;
            };
            if hi - lo > 1 {
                return Err(Error::Unsupported(format!("{term:?} spans columns {lo}..={hi}")));
            }
            let cols: Vec<usize> = if hi == lo { vec![lo] } else { vec![lo, hi] };
            let block = local_block(map, params, &term, &cols)?;
            if cols.len() == 1 {
                out.sites[lo] += block;
            } else {
                out.bonds[lo] += block;
            }
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Identity part, the two per-ring hole offsets.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn site_operator(&self, j: usize) -> &DMatrix<f64> {
        &self.sites[j]
    }

    pub fn bond_operator(&self, j: usize) -> &DMatrix<f64> {
        &self.bonds[j]
    }

    /// `H_chain |index⟩`.
    pub fn apply(&self, index: u64, emit: &mut impl FnMut(u64, f64)) {
        if self.constant != 0.0 {
            emit(index, self.constant);
        }
        for (j, m) in self.sites.iter().enumerate() {
            let v = digit9(index, j);
            for out in 0..9 {
                let c = m[(out, v)];
                if c != 0.0 {
                    emit(with_digit9(index, j, out), c);
                }
            }
        }
        for (j, m) in self.bonds.iter().enumerate() {
            let v = digit9(index, j) + 9 * digit9(index, j + 1);
            for out in 0..81 {
                let c = m[(out, v)];
                if c != 0.0 {
                    emit(with_digit9(with_digit9(index, j, out % 9), j + 1, out / 9), c);
                }
            }
        }
    }

    /// Assemble over a list of chain indices.
    pub fn assemble(&self, states: &[u64]) -> Result<SparseOperator> {
        let lookup: HashMap<u64, u32> = states.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();
        let mut rows = Vec::with_capacity(states.len());
        for &s in states {
            let mut row = Vec::new();
            let mut missing = None;
            self.apply(s, &mut |t, v| match lookup.get(&t) {
                Some(&p) => row.push((p, v)),
                None => missing = Some(t),
            });
            if let Some(t) = missing {
                return Err(invalid(format!("chain state {t} outside the supplied basis")));
            }
            rows.push(row);
        }
        SparseOperator::from_rows(states.len(), BasisTag::Chain, rows)
    }
}

/// Matrix of one term on the local space of `cols` (9 or 81 states). The
/// term is evaluated on two different backgrounds; any dependence on sites
/// outside `cols` is an error.
fn local_block(map: &BrickMap, params: &ModelParams, term: &LocalTerm, cols: &[usize]) -> Result<DMatrix<f64>> {
    let n = map.n;
    let local_slots: Vec<usize> = (0..2 * n).filter(|&s| cols.contains(&map.column[s])).collect();
    let dim = 9usize.pow(cols.len() as u32);
    // Local index of a slot: 2·(column offset) + layer.
    let local_pos = |s: usize| 2 * (map.column[s] - cols[0]) + map.layer[s];
    let mut block = DMatrix::zeros(dim, dim);
    for (bg_id, background) in [0u64, (pow3(2 * n) - 1) / 2].into_iter().enumerate() {
        let mut this = DMatrix::zeros(dim, dim);
        for local in 0..dim as u64 {
            let mut index = background;
            for &s in &local_slots {
                index = with_digit(index, s, ((local / pow3(local_pos(s))) % 3) as u8);
            }
            let mut bad = false;
            term.apply(params, index, &mut |t, v| {
                let outside_changed = (0..2 * n).any(|s| !local_slots.contains(&s) && digit(t, s) != digit(index, s));
                if outside_changed {
                    bad = true;
                    return;
                }
                let out: u64 = local_slots.iter().map(|&s| digit(t, s) as u64 * pow3(local_pos(s))).sum();
                this[(out as usize, local as usize)] += v;
            });
            if bad {
                return Err(Error::Unsupported(format!("{term:?} acts outside columns {cols:?}")));
            }
        }
        if bg_id == 0 {
            block = this;
        } else if block != this {
            return Err(Error::Unsupported(format!("{term:?} depends on sites outside columns {cols:?}")));
        }
    }
    Ok(block)
}
