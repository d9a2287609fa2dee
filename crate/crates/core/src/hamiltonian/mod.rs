//! The two-ring Hamiltonian `H = H_L + H_R + H_B + H_P + H_V`.
//!
//! Operators are assembled column by column: every basis state is pushed
//! through each local rule and the images are looked up in the basis. Every
//! term conserves the hole count of each ring, so any sector basis is closed.

mod brick;
mod terms;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{check_ring_size, Basis, Sector};
use crate::sparse::SparseOperator;

pub use brick::{brick_permutation, BrickMap, ChainHamiltonian};
pub use terms::{all_terms, local_terms, ring_potential, LocalTerm};

/// Ring size and hole potentials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    /// Hole self-energy coefficient.
    pub v1: f64,
    /// Adjacent-hole penalty.
    pub v2: f64,
}

impl ModelParams {
    /// `V1 = 1/N⁴`, `V2 = 1`.
    pub fn new(n: usize) -> Self {
        Self { n, v1: 1.0 / (n as f64).powi(4), v2: 1.0 }
    }

    pub fn with_potentials(n: usize, v1: f64, v2: f64) -> Self {
        Self { n, v1, v2 }
    }

    pub fn validate(&self) -> Result<()> {
        check_ring_size(self.n)?;
        if !(self.v1.is_finite() && self.v1 >= 0.0 && self.v2.is_finite() && self.v2 >= 0.0) {
            return Err(invalid(format!("potentials must be finite and non-negative (V1 = {}, V2 = {})", self.v1, self.v2)));
        }
        Ok(())
    }
}

/// The five terms of `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermKind {
    /// `H_L`
    LeftHop,
    /// `H_R`
    RightHop,
    /// `H_B`
    JunctionHop,
    /// `H_P`
    SingletPenalty,
    /// `H_V = H_V^L + H_V^R`
    HolePotential,
}

impl TermKind {
    pub const ALL: [TermKind; 5] = [
        TermKind::LeftHop,
        TermKind::RightHop,
        TermKind::JunctionHop,
        TermKind::SingletPenalty,
        TermKind::HolePotential,
    ];

    pub fn short_name(&self) -> &'static str {
        match self {
            TermKind::LeftHop => "HL",
            TermKind::RightHop => "HR",
            TermKind::JunctionHop => "HB",
            TermKind::SingletPenalty => "HP",
            TermKind::HolePotential => "HV",
        }
    }
}

/// Assemble a sum of local terms over `basis`.
pub fn assemble_terms(terms: &[LocalTerm], params: &ModelParams, basis: &Basis) -> Result<SparseOperator> {
    params.validate()?;
    if basis.n() != params.n {
        return Err(invalid(format!("basis is for N = {}, params for N = {}", basis.n(), params.n)));
    }
    let columns: Vec<Vec<(u32, f64)>> = (0..basis.dim())
        .into_par_iter()
        .map(|pos| {
            let index = basis.state(pos);
            let mut out = Vec::with_capacity(4 * terms.len());
            let mut missing = None;
            for term in terms {
                term.apply(params, index, &mut |target, value| match basis.position(target) {
                    Some(p) => out.push((p as u32, value)),
                    None => missing = Some(target),
                });
            }
            match missing {
                Some(t) => Err(Error::InvalidInput(format!(
                    "term maps state {index} to {t}, outside basis {}",
                    basis.tag()
                ))),
                None => Ok(out),
            }
        })
        .collect::<Result<_>>()?;
    // H is symmetric, so column j of H doubles as row j.
    SparseOperator::from_rows(basis.dim(), basis.tag(), columns)
}

pub fn build_term(kind: TermKind, params: &ModelParams, basis: &Basis) -> Result<SparseOperator> {
    assemble_terms(&local_terms(kind, params.n), params, basis)
}

/// The full Hamiltonian over `basis`.
pub fn assemble(params: &ModelParams, basis: &Basis) -> Result<SparseOperator> {
    assemble_terms(&all_terms(params.n), params, basis)
}

/// `H` restricted to one sector.
pub fn sector_hamiltonian(params: &ModelParams, sector: Sector) -> Result<SparseOperator> {
    assemble(params, &Basis::sector(params.n, sector)?)
}
