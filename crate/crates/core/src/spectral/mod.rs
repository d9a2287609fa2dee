//! Eigensolvers and the analytic spectral facts about the grid walk.
//!
//! Small operators go through a dense symmetric solve; larger ones through
//! Lanczos with full reorthogonalization, optionally on the shifted inverse
//! when the wanted eigenvalues sit far below the operator norm.

mod bounds;
mod dense;
mod factor;
mod fermion;
mod grid;
mod lanczos;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sparse::SparseOperator;

pub use bounds::{hastings_bound, hastings_bound_log2, HastingsBoundParams};
pub use dense::{eig_dense, eig_dense_matrix};
pub use factor::{rcm_ordering, ShiftedInverse};
pub use fermion::fermion_amplitude;
pub use grid::{
    cosine_sum, grid_gram_deviation, hp_cross_element, hp_cross_element_direct, lambda_k, lemma_highm_probe,
    path_laplacian, verify_hp_identities, GridMode, HighmProber, HpIdentityReport, LemmaProbe,
};
pub use lanczos::{eig_lowest, eig_lowest_with};

/// How `eig_lowest` drives the Krylov iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverMode {
    /// Shift-invert when the factor fits the memory budget, plain otherwise.
    #[default]
    Auto,
    Plain,
    ShiftInvert,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Bound on the true residual `‖Hv − λv‖` of every returned pair.
    pub tol: f64,
    pub seed: u64,
    /// Restart budget of one Krylov pass.
    pub max_iter: usize,
    /// Largest dimension handed to the dense solver.
    pub dense_cap: usize,
    /// Krylov basis size; 0 picks one from `k`.
    pub basis_size: usize,
    pub mode: SolverMode,
    /// Stored entries allowed in a Cholesky factor.
    pub factor_budget: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            seed: 42,
            max_iter: 2000,
            dense_cap: 20_000,
            basis_size: 0,
            mode: SolverMode::Auto,
            factor_budget: 60_000_000,
        }
    }
}

/// Lowest part of a spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub dim: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub ground_energy: f64,
    /// `λ₁ − λ₀` of the listed values, `NaN` when only one is listed.
    pub gap: f64,
    pub ground_vector: Option<Vec<f64>>,
    /// `‖Hv − λv‖` per listed pair.
    pub residuals: Vec<f64>,
}

impl Spectrum {
    pub(crate) fn from_pairs(dim: usize, eigenvalues: Vec<f64>, residuals: Vec<f64>, ground_vector: Option<Vec<f64>>) -> Self {
        let ground_energy = eigenvalues.first().copied().unwrap_or(f64::NAN);
        let gap = if eigenvalues.len() >= 2 { eigenvalues[1] - eigenvalues[0] } else { f64::NAN };
        Self { dim, eigenvalues, ground_energy, gap, ground_vector, residuals }
    }

    /// Keep the lowest `k` values.
    pub fn truncated(mut self, k: usize) -> Self {
        self.eigenvalues.truncate(k);
        self.residuals.truncate(k);
        Self::from_pairs(self.dim, self.eigenvalues, self.residuals, self.ground_vector)
    }

    pub fn report(&self, cfg: &SolverConfig) -> SpectrumReport {
        SpectrumReport {
            dim: self.dim,
            k: self.eigenvalues.len(),
            eigenvalues: self.eigenvalues.clone(),
            gap: self.gap,
            residuals: self.residuals.clone(),
            seed: cfg.seed,
            tol: cfg.tol,
        }
    }
}

/// JSON form of a [`Spectrum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub dim: usize,
    pub k: usize,
    pub eigenvalues: Vec<f64>,
    pub gap: f64,
    pub residuals: Vec<f64>,
    pub seed: u64,
    pub tol: f64,
}

/// Largest dimension `eig_auto` diagonalizes densely; beyond it a few
/// Krylov pairs are cheaper than the full cubic solve.
pub const AUTO_DENSE_MAX: usize = 800;

/// Lowest `k` eigenpairs, dense for small operators and Krylov above.
pub fn eig_auto(op: &SparseOperator, k: usize, cfg: &SolverConfig) -> Result<Spectrum> {
    if op.dim() <= cfg.dense_cap.min(AUTO_DENSE_MAX) {
        Ok(eig_dense(op, cfg)?.truncated(k))
    } else {
        eig_lowest_with(op, k, cfg)
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub(crate) fn residual_norm(op: &SparseOperator, lambda: f64, v: &[f64]) -> f64 {
    let hv = op.apply_vec(v);
    hv.iter().zip(v).map(|(h, x)| (h - lambda * x).powi(2)).sum::<f64>().sqrt()
}
