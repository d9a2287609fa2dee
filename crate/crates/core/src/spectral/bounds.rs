use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Inputs of the gap-based entanglement ceiling for one-dimensional chains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HastingsBoundParams {
    /// Spectral gap.
    pub delta: f64,
    /// On-site dimension.
    pub d: f64,
    /// Lieb-Robinson velocity.
    pub v: f64,
    /// Correlation leakage length.
    pub xi_c: f64,
    pub c0: f64,
}

impl HastingsBoundParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.delta, self.d, self.v, self.xi_c, self.c0];
        if all.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(invalid(format!("bound parameters must be positive and finite: {self:?}")));
        }
        Ok(())
    }

    /// `ξ′ = 6 max(2v/Δ, ξ_c)`.
    pub fn xi_prime(&self) -> f64 {
        6.0 * (2.0 * self.v / self.delta).max(self.xi_c)
    }
}

/// `S_max = c₀ ξ′ ln ξ′ ln D · 2^{ξ′ ln D}`, overflowing to `inf` for small gaps.
pub fn hastings_bound(params: &HastingsBoundParams) -> Result<f64> {
    Ok(hastings_bound_log2(params)?.exp2())
}

/// `log₂ S_max`, finite for any gap.
pub fn hastings_bound_log2(params: &HastingsBoundParams) -> Result<f64> {
    params.validate()?;
    let xi = params.xi_prime();
    let ln_d = params.d.ln();
    let prefactor = params.c0 * xi * xi.ln() * ln_d;
    if !(prefactor > 0.0) {
        return Err(invalid(format!("ceiling undefined for ξ′ = {xi}, D = {}", params.d)));
    }
    Ok(prefactor.log2() + xi * ln_d)
}
