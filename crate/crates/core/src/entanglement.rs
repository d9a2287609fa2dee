//! Entanglement between the two rings.
//!
//! A state over the full space is reshaped into a `3^N × 3^N` matrix whose
//! row is the left-ring index and whose column is the right-ring index (the
//! left ring occupies the low base-3 digits). Its singular values are the
//! Schmidt coefficients across the ring-ring cut.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{check_ring_size, digit, full_dimension, pow3, sector_of_index, slot, swap_digits, Ring, Sector, MAX_FULL_DIM};
use crate::symmetry::{class_of, embed_node, BellIndex, GraphNode};

/// Schmidt coefficients below this count as zero.
pub const SCHMIDT_ZERO: f64 = 1e-12;

/// `|g⟩ = (1/N) Σ_{a,b} M_{a,b} |xx⟩_N ⊗ |Ψ⁻⟩^{⊗(N−1)}` over the full space.
pub fn ground_state_exact(n: usize) -> Result<Vec<f64>> {
    check_ring_size(n)?;
    let dim = full_dimension(n);
    if dim > MAX_FULL_DIM {
        return Err(Error::Capacity(format!("full space of N = {n} has {dim} states, cap {MAX_FULL_DIM}")));
    }
    let mut psi = vec![0.0; dim as usize];
    for (idx, amp) in ground_state_components(n)? {
        psi[idx as usize] += amp;
    }
    Ok(psi)
}

/// Nonzero components of `|g⟩`, sorted by index.
pub fn ground_state_components(n: usize) -> Result<Vec<(u64, f64)>> {
    check_ring_size(n)?;
    let singlets = class_of(&vec![BellIndex::PsiMinus; n - 1])?;
    let w = 1.0 / n as f64;
    let mut out = Vec::with_capacity(n * n << (n - 1));
    for a in 1..=n {
        for b in 1..=n {
            out.extend(embed_node(&singlets, GraphNode::new(a, b, 0))?.into_iter().map(|(i, x)| (i, w * x)));
        }
    }
    out.sort_by_key(|&(i, _)| i);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Descending.
    pub singular_values: Vec<f64>,
    pub left_dim: usize,
    pub right_dim: usize,
    /// Left Schmidt vectors as columns.
    left: DMatrix<f64>,
    /// Right Schmidt vectors as columns.
    right: DMatrix<f64>,
}

impl SchmidtDecomposition {
    /// Decompose a full-space state of two rings of `n` sites.
    pub fn new(n: usize, state: &[f64]) -> Result<Self> {
        check_ring_size(n)?;
        let side = pow3(n) as usize;
        if state.len() != side * side {
            return Err(invalid(format!("state has {} amplitudes, expected {}", state.len(), side * side)));
        }
        let m = DMatrix::from_column_slice(side, side, state);
        let svd = m.svd(true, true);
        let mut order: Vec<usize> = (0..side).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let u = svd.u.expect("requested");
        let vt = svd.v_t.expect("requested");
        Ok(Self {
            singular_values: order.iter().map(|&i| svd.singular_values[i]).collect(),
            left_dim: side,
            right_dim: side,
            left: DMatrix::from_fn(side, side, |r, c| u[(r, order[c])]),
            right: DMatrix::from_fn(side, side, |r, c| vt[(order[c], r)]),
        })
    }

    /// Count of coefficients above [`SCHMIDT_ZERO`].
    pub fn rank(&self) -> usize {
        self.singular_values.iter().filter(|&&s| s > SCHMIDT_ZERO).count()
    }

    pub fn weight(&self) -> f64 {
        self.singular_values.iter().map(|s| s * s).sum()
    }

    /// `tr_{other} |ψ⟩⟨ψ|` as `U diag(s²) Uᵀ`.
    pub fn reduced_density(&self, side: Side) -> DMatrix<f64> {
        let vecs = match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        let mut scaled = vecs.clone();
        for (c, s) in self.singular_values.iter().enumerate() {
            scaled.column_mut(c).scale_mut(s * s);
        }
        scaled * vecs.transpose()
    }

    /// Rows `index, singular_value`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["index", "singular_value"])?;
        for (i, s) in self.singular_values.iter().enumerate() {
            out.write_record([i.to_string(), format!("{s:.17e}")])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Reduced density matrix of one ring.
pub fn reduced_density(n: usize, state: &[f64], side: Side) -> Result<DMatrix<f64>> {
    Ok(SchmidtDecomposition::new(n, state)?.reduced_density(side))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenyiEntropy {
    pub alpha: f64,
    pub bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub von_neumann_bits: f64,
    pub renyi: Vec<RenyiEntropy>,
    pub schmidt_rank: usize,
}

/// Entropies of the Schmidt spectrum. `α = 1` is the von Neumann entropy.
pub fn entropies(schmidt: &SchmidtDecomposition, alphas: &[f64]) -> Result<EntropyReport> {
    let probs: Vec<f64> = schmidt.singular_values.iter().filter(|&&s| s > SCHMIDT_ZERO).map(|s| s * s).collect();
    spectrum_entropies(&probs, alphas)
}

/// Entropies of a density matrix through its eigenvalues.
pub fn density_entropies(rho: &DMatrix<f64>, alphas: &[f64]) -> Result<EntropyReport> {
    if !rho.is_square() {
        return Err(invalid("density matrix must be square"));
    }
    let eig = SymmetricEigen::new(rho.clone());
    let probs: Vec<f64> = eig.eigenvalues.iter().copied().filter(|&p| p > SCHMIDT_ZERO * SCHMIDT_ZERO).collect();
    spectrum_entropies(&probs, alphas)
}

fn spectrum_entropies(probs: &[f64], alphas: &[f64]) -> Result<EntropyReport> {
    let von_neumann_bits = -probs.iter().map(|&p| p * p.log2()).sum::<f64>();
    let renyi = alphas
        .iter()
        .map(|&alpha| {
            if !(alpha > 0.0) || !alpha.is_finite() {
                return Err(invalid(format!("Rényi order must be positive and finite, got {alpha}")));
            }
            let bits = if alpha == 1.0 {
                von_neumann_bits
            } else {
                let tr: f64 = probs.iter().map(|p| p.powf(alpha)).sum();
                tr.ln() / (1.0 - alpha) / std::f64::consts::LN_2
            };
            Ok(RenyiEntropy { alpha, bits })
        })
        .collect::<Result<_>>()?;
    Ok(EntropyReport { von_neumann_bits, renyi, schmidt_rank: probs.len() })
}

/// Result of measuring both hole positions of `|g⟩` and undoing the shifts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoccReport {
    pub n: usize,
    /// `(a, b, probability, fidelity)` for every outcome.
    pub outcomes: Vec<(usize, usize, f64, f64)>,
    /// Largest `|P(a, b) − 1/N²|`.
    pub max_probability_deviation: f64,
    pub min_fidelity: f64,
}

/// Move the hole of `ring` from site `a` back to `N` by adjacent swaps.
fn unshift_hole(n: usize, ring: Ring, a: usize, index: u64) -> u64 {
    (a..n).fold(index, |idx, i| swap_digits(idx, slot(n, ring, i), slot(n, ring, i + 1)))
}

pub fn locc_reduction_check(n: usize) -> Result<LoccReport> {
    check_ring_size(n)?;
    if full_dimension(n) > MAX_FULL_DIM {
        return Err(Error::Capacity(format!("N = {n} exceeds the full-space cap")));
    }
    let g = ground_state_components(n)?;
    // Reference |xx⟩_N ⊗ |Ψ⁻⟩^{⊗(N−1)}, written out pair by pair.
    let mut reference = std::collections::HashMap::new();
    let holes = 2 * pow3(slot(n, Ring::Left, n)) + 2 * pow3(slot(n, Ring::Right, n));
    for choice in 0..1u64 << (n - 1) {
        let mut idx = holes;
        let mut amp = 1.0;
        for i in 1..n {
            let (l, r, c) = BellIndex::PsiMinus.amplitudes()[((choice >> (i - 1)) & 1) as usize];
            idx += l as u64 * pow3(slot(n, Ring::Left, i)) + r as u64 * pow3(slot(n, Ring::Right, i));
            amp *= c;
        }
        reference.insert(idx, amp);
    }
    let hole_at = |idx: u64, ring: Ring| (1..=n).find(|&s| digit(idx, slot(n, ring, s)) == 2);
    let mut buckets: Vec<Vec<(u64, f64)>> = vec![Vec::new(); n * n];
    for &(idx, amp) in &g {
        if sector_of_index(n, idx) != Sector::new(1, 1) {
            return Err(invalid("ground state left the one-hole sector"));
        }
        let (a, b) = (hole_at(idx, Ring::Left).unwrap(), hole_at(idx, Ring::Right).unwrap());
        buckets[(a - 1) * n + (b - 1)].push((idx, amp));
    }
    let uniform = 1.0 / (n * n) as f64;
    let mut report = LoccReport { n, outcomes: Vec::new(), max_probability_deviation: 0.0, min_fidelity: f64::INFINITY };
    for a in 1..=n {
        for b in 1..=n {
            let bucket = &buckets[(a - 1) * n + (b - 1)];
            let prob: f64 = bucket.iter().map(|(_, x)| x * x).sum();
            let overlap: f64 = bucket
                .iter()
                .map(|&(idx, x)| {
                    let back = unshift_hole(n, Ring::Right, b, unshift_hole(n, Ring::Left, a, idx));
                    reference.get(&back).copied().unwrap_or(0.0) * x
                })
                .sum::<f64>()
                / prob.sqrt();
            let fidelity = overlap * overlap;
            report.max_probability_deviation = report.max_probability_deviation.max((prob - uniform).abs());
            report.min_fidelity = report.min_fidelity.min(fidelity);
            report.outcomes.push((a, b, prob, fidelity));
        }
    }
    Ok(report)
}
