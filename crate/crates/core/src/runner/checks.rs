//! Cross-checks between the full Hamiltonian and its reductions.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{all_terms, assemble, brick_permutation, sector_hamiltonian, ChainHamiltonian, ModelParams};
use crate::hilbert::{
    enumerate_sector, full_dimension, ring_sector_dimension, sector_of_index, Basis, Sector, MAX_FULL_DIM, MAX_RING,
};
use crate::nullspace::sector_lower_bound;
use crate::spectral::{eig_auto, eig_dense_matrix, SolverConfig, Spectrum, AUTO_DENSE_MAX};
use crate::symmetry::{build_effective, embed_node, necklace_classes, GraphNode};
use crate::BasisTag;

/// Largest `N` whose full space the checks walk sector by sector.
pub const FULL_SPACE_MAX_N: usize = 5;

fn check_full_space(n: usize) -> Result<()> {
    if n > FULL_SPACE_MAX_N || full_dimension(n) > MAX_FULL_DIM {
        return Err(Error::Capacity(format!(
            "full-space checks stop at N = {FULL_SPACE_MAX_N}; for N = {n} use `gap-scan` (effective classes) \
             or `effective --n {n} --p <p> --bad <r>`"
        )));
    }
    Ok(())
}

/// Lowest `k` eigenpairs of every sector, in sector order.
pub fn sector_spectra(params: &ModelParams, k: usize, solver: &SolverConfig) -> Result<Vec<(Sector, Spectrum)>> {
    check_full_space(params.n)?;
    let sectors: Vec<Sector> = Sector::all(params.n).collect();
    sectors
        .into_par_iter()
        .map(|s| {
            let h = sector_hamiltonian(params, s)?;
            Ok((s, eig_auto(&h, k.min(h.dim()), solver)?))
        })
        .collect()
}

/// The two lowest levels of the full Hamiltonian, assembled from sectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowSpectrum {
    pub n: usize,
    pub lambda0: f64,
    pub lambda1: f64,
    pub ground_sector: Sector,
    pub ground_residual: f64,
    pub lambda1_residual: f64,
    /// Ground vector over full-space indices, sorted.
    pub ground_vector: Vec<(u64, f64)>,
    /// Lowest level of every sector other than `(1, 1)`.
    pub other_sector_minima: Vec<(Sector, f64, f64)>,
}

impl LowSpectrum {
    pub fn gap(&self) -> f64 {
        self.lambda1 - self.lambda0
    }
}

pub fn low_spectrum(params: &ModelParams, solver: &SolverConfig) -> Result<LowSpectrum> {
    let spectra = sector_spectra(params, 2, solver)?;
    let mut levels: Vec<(f64, f64, usize)> = Vec::new();
    for (i, (_, sp)) in spectra.iter().enumerate() {
        levels.extend(sp.eigenvalues.iter().zip(&sp.residuals).map(|(&e, &r)| (e, r, i)));
    }
    levels.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (e0, r0, i0) = levels[0];
    let (e1, r1, _) = levels[1];
    let (sector, sp) = &spectra[i0];
    let basis = Basis::sector(params.n, *sector)?;
    let v = sp.ground_vector.as_ref().ok_or_else(|| Error::Accuracy("solver returned no ground vector".into()))?;
    let ground_vector = (0..basis.dim()).map(|p| (basis.state(p), v[p])).collect();
    let other_sector_minima = spectra
        .iter()
        .filter(|(s, _)| *s != Sector::new(1, 1))
        .map(|(s, sp)| (*s, sp.eigenvalues[0], sp.residuals[0]))
        .collect();
    Ok(LowSpectrum {
        n: params.n,
        lambda0: e0,
        lambda1: e1,
        ground_sector: *sector,
        ground_residual: r0,
        lambda1_residual: r1,
        ground_vector,
        other_sector_minima,
    })
}

/// `|⟨u|v⟩|` of two sparse vectors sorted by index.
pub fn sparse_overlap(u: &[(u64, f64)], v: &[(u64, f64)]) -> f64 {
    let map: HashMap<u64, f64> = u.iter().copied().collect();
    v.iter().map(|(i, x)| map.get(i).copied().unwrap_or(0.0) * x).sum::<f64>().abs()
}

/// Largest matrix element of the full Hamiltonian between different sectors.
pub fn sector_leak(params: &ModelParams) -> Result<f64> {
    check_full_space(params.n)?;
    let h = assemble(params, &Basis::full(params.n)?)?;
    let n = params.n;
    Ok(h.upper_entries()
        .filter(|&(i, j, _)| sector_of_index(n, i as u64) != sector_of_index(n, j as u64))
        .map(|(_, _, v)| v.abs())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub classes: usize,
    /// `max |⟨e_i|e_j⟩ − δ_ij|`.
    pub gram_deviation: f64,
    /// `max |⟨e_i|H|e_j⟩ − H_eff[i, j]|`.
    pub element_deviation: f64,
    /// `max |‖H e_j‖² − Σ_i ⟨e_i|H|e_j⟩²|`, zero when the span is invariant.
    pub leak: f64,
}

/// Compare every class's effective operator with `H` sandwiched between
/// the embedded node states.
pub fn embedding_isometry(params: &ModelParams) -> Result<IsometryReport> {
    let n = params.n;
    let terms = all_terms(n);
    let classes = necklace_classes(n)?;
    let per_class: Vec<(f64, f64, f64)> = classes
        .par_iter()
        .map(|class| {
            let sig = class.signature();
            let eff = build_effective(&sig)?;
            let dim = sig.dim();
            let embs = (0..dim).map(|i| embed_node(class, GraphNode::from_index(n, i))).collect::<Result<Vec<_>>>()?;
            let mut owner: HashMap<u64, Vec<(usize, f64)>> = HashMap::new();
            for (i, e) in embs.iter().enumerate() {
                for &(idx, a) in e {
                    owner.entry(idx).or_default().push((i, a));
                }
            }
            let mut gram = vec![0.0; dim * dim];
            for list in owner.values() {
                for &(i, a) in list {
                    for &(j, b) in list {
                        gram[i * dim + j] += a * b;
                    }
                }
            }
            let gram_dev = (0..dim * dim)
                .map(|ij| (gram[ij] - if ij / dim == ij % dim { 1.0 } else { 0.0 }).abs())
                .fold(0.0, f64::max);
            let (mut elem_dev, mut leak) = (0.0f64, 0.0f64);
            for (j, e) in embs.iter().enumerate() {
                let mut hv: HashMap<u64, f64> = HashMap::new();
                for &(idx, a) in e {
                    for t in &terms {
                        t.apply(params, idx, &mut |out, c| *hv.entry(out).or_default() += a * c);
                    }
                }
                let mut col = vec![0.0; dim];
                for (out, val) in &hv {
                    if let Some(list) = owner.get(out) {
                        for &(i, a) in list {
                            col[i] += a * val;
                        }
                    }
                }
                for (i, &c) in col.iter().enumerate() {
                    elem_dev = elem_dev.max((c - eff.get(i, j)).abs());
                }
                let norm2: f64 = hv.values().map(|x| x * x).sum();
                leak = leak.max((norm2 - col.iter().map(|x| x * x).sum::<f64>()).abs());
            }
            Ok((gram_dev, elem_dev, leak))
        })
        .collect::<Result<_>>()?;
    Ok(per_class.iter().fold(
        IsometryReport { classes: classes.len(), gram_deviation: 0.0, element_deviation: 0.0, leak: 0.0 },
        |r, &(g, e, l)| IsometryReport {
            gram_deviation: r.gram_deviation.max(g),
            element_deviation: r.element_deviation.max(e),
            leak: r.leak.max(l),
            ..r
        },
    ))
}

/// Sorted union of every class spectrum, one copy per class.
pub fn class_union_spectrum(n: usize) -> Result<Vec<f64>> {
    let classes = necklace_classes(n)?;
    let mut all: Vec<f64> = classes
        .par_iter()
        .map(|c| Ok(eig_dense_matrix(build_effective(&c.signature())?.to_dense()).0))
        .collect::<Result<Vec<_>>>()?
        .concat();
    all.sort_by(f64::total_cmp);
    Ok(all)
}

/// `max |λ_i(class union) − λ_i(sector (1,1))|`, both fully diagonalized.
pub fn class_spectrum_deviation(params: &ModelParams, solver: &SolverConfig) -> Result<f64> {
    let h = sector_hamiltonian(params, Sector::new(1, 1))?;
    if h.dim() > solver.dense_cap {
        return Err(Error::Capacity(format!("sector (1,1) of dimension {} above the dense cap", h.dim())));
    }
    let direct = eig_dense_matrix(h.to_dense()).0;
    let union = class_union_spectrum(params.n)?;
    if union.len() != direct.len() {
        return Err(Error::Accuracy(format!("class dimensions sum to {}, sector has {}", union.len(), direct.len())));
    }
    Ok(union.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrickReport {
    pub n: usize,
    /// Widest column distance spanned by a single term.
    pub max_span: usize,
    /// Largest entry of `P H Pᵀ − H_chain` over all sectors.
    pub element_deviation: f64,
    /// Largest eigenvalue difference over the compared levels.
    pub spectrum_deviation: f64,
    /// Sectors whose full spectra were compared.
    pub full_sectors: usize,
    /// Sectors compared on their lowest levels only.
    pub partial_sectors: usize,
}

/// Levels compared in sectors too large for a dense solve.
const BRICK_PARTIAL_LEVELS: usize = 4;

/// Rebuild every sector on the nine-state chain and compare with the
/// directly assembled sector operator.
pub fn brick_check(params: &ModelParams, solver: &SolverConfig) -> Result<BrickReport> {
    let n = params.n;
    let map = brick_permutation(n)?;
    let chain = ChainHamiltonian::new(&map, params)?;
    let max_span = map.max_term_span();
    let sectors: Vec<Sector> = Sector::all(n).collect();
    let per: Vec<(f64, f64, bool)> = sectors
        .into_par_iter()
        .map(|s| {
            let states = enumerate_sector(n, s)?;
            let h = sector_hamiltonian(params, s)?;
            let mut chain_states: Vec<u64> = states.iter().map(|&x| map.chain_index(x)).collect();
            let lookup: HashMap<u64, usize> = {
                let mut sorted = chain_states.clone();
                sorted.sort_unstable();
                sorted.into_iter().enumerate().map(|(p, c)| (c, p)).collect()
            };
            let perm: Vec<usize> = chain_states.iter().map(|c| lookup[c]).collect();
            chain_states.sort_unstable();
            let hc = chain.assemble(&chain_states)?;
            let moved = h.permuted(&perm, BasisTag::Chain)?;
            let diff = moved.add(&hc.scaled(-1.0))?;
            let elem = (0..diff.dim())
                .flat_map(|i| diff.row(i).1.iter().map(|v| v.abs()).collect::<Vec<_>>())
                .fold(0.0, f64::max);
            let (spec, full) = if h.dim() <= solver.dense_cap.min(AUTO_DENSE_MAX) {
                let a = eig_dense_matrix(h.to_dense()).0;
                let b = eig_dense_matrix(hc.to_dense()).0;
                (a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max), true)
            } else {
                let k = BRICK_PARTIAL_LEVELS.min(h.dim());
                let a = eig_auto(&h, k, solver)?;
                let b = eig_auto(&hc, k, solver)?;
                let d = a.eigenvalues.iter().zip(&b.eigenvalues).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                (d, false)
            };
            Ok((elem, spec, full))
        })
        .collect::<Result<_>>()?;
    let mut report = BrickReport {
        n,
        max_span,
        element_deviation: 0.0,
        spectrum_deviation: 0.0,
        full_sectors: 0,
        partial_sectors: 0,
    };
    for (e, s, full) in per {
        report.element_deviation = report.element_deviation.max(e);
        report.spectrum_deviation = report.spectrum_deviation.max(s);
        if full {
            report.full_sectors += 1;
        } else {
            report.partial_sectors += 1;
        }
    }
    Ok(report)
}

/// Largest single-ring sector the headline scan diagonalizes.
pub const HEADLINE_RING_CAP: usize = 2000;

/// Lower bound on every sector other than `(1, 1)` from the single-ring
/// bounds, pairing the two rings. Rings whose sector is too large to
/// diagonalize are left out and reported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OtherSectorBound {
    pub n: usize,
    /// Per hole count `a ≠ 1`: bound on `H_L + H_V^L` when computed.
    pub ring_bounds: Vec<(usize, f64)>,
    pub skipped: Vec<usize>,
    pub bound: f64,
}

pub fn other_sector_bound(params: &ModelParams, ring_cap: usize) -> Result<OtherSectorBound> {
    let n = params.n;
    let holes: Vec<usize> = (2..=n).collect();
    let (fits, skipped): (Vec<usize>, Vec<usize>) =
        holes.into_iter().partition(|&a| n <= MAX_RING && ring_sector_dimension(n, a) as usize <= ring_cap);
    // Without holes nothing hops and the ring energy is exactly V1.
    let mut ring_bounds = vec![(0, params.v1)];
    ring_bounds.extend(
        fits.par_iter()
            .map(|&a| Ok((a, sector_lower_bound(n, a, params)?.lower_bound)))
            .collect::<Result<Vec<_>>>()?,
    );
    // A one-hole ring contributes at least 0; pair every computed bound
    // with it and with every other computed bound.
    let mut values: Vec<f64> = ring_bounds.iter().map(|&(_, b)| b).collect();
    values.push(0.0);
    let one_hole = values.len() - 1;
    let mut bound = f64::INFINITY;
    for (i, &x) in values.iter().enumerate() {
        for (j, &y) in values.iter().enumerate() {
            if i != one_hole || j != one_hole {
                bound = bound.min(x + y);
            }
        }
    }
    Ok(OtherSectorBound { n, ring_bounds, skipped, bound })
}
