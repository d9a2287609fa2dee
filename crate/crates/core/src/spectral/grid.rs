//! Cosine eigenbasis of the `N × N` grid walk and the matrix elements built
//! on it.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sparse::SparseOperator;
use crate::symmetry::{build_walk, ClassSignature};

/// Largest grid for [`verify_hp_identities`].
pub const HP_DIRECT_MAX: usize = 64;

/// Eigenvalue `2(1 − cos(πk/N))` of the open path walk on `N` sites.
pub fn lambda_k(n: usize, k: usize) -> f64 {
    // 4 sin² keeps full relative precision at small k.
    let s = (PI * k as f64 / (2.0 * n as f64)).sin();
    4.0 * s * s
}

/// One mode `f_kl ⊗ e^{2πimr/p}` of the chained grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridMode {
    pub k: usize,
    pub l: usize,
    pub m: usize,
}

impl GridMode {
    pub fn new(k: usize, l: usize, m: usize) -> Self {
        Self { k, l, m }
    }

    /// `1/N`, `√2/N` or `2/N` for zero, one or two nonzero indices.
    pub fn normalization(&self, n: usize) -> f64 {
        path_norm(n, self.k) * path_norm(n, self.l)
    }

    /// `f_kl(a, b)` for 1-based `a`, `b`.
    pub fn amplitude(&self, n: usize, a: usize, b: usize) -> f64 {
        self.normalization(n) * half_cos(n, self.k, a) * half_cos(n, self.l, b)
    }

    /// `λ_k + λ_l`.
    pub fn walk_eigenvalue(&self, n: usize) -> f64 {
        lambda_k(n, self.k) + lambda_k(n, self.l)
    }
}

fn path_norm(n: usize, k: usize) -> f64 {
    if k == 0 {
        (1.0 / n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt()
    }
}

fn half_cos(n: usize, k: usize, a: usize) -> f64 {
    (PI * k as f64 * (a as f64 - 0.5) / n as f64).cos()
}

/// Normalized path mode `g_k(a)`, `a = 1..=N`, as an `N × N` matrix with
/// column `k`.
fn path_modes(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |a, k| path_norm(n, k) * half_cos(n, k, a + 1))
}

/// Graph Laplacian of the open path on `n` sites.
pub fn path_laplacian(n: usize) -> SparseOperator {
    let mut upper = Vec::with_capacity(2 * n);
    for i in 0..n {
        let deg = (i > 0) as usize + (i + 1 < n) as usize;
        upper.push((i, i, deg as f64));
        if i + 1 < n {
            upper.push((i, i + 1, -1.0));
        }
    }
    SparseOperator::from_upper(n, crate::sparse::BasisTag::Custom, upper).expect("valid path")
}

/// Deviations of the grid modes from an orthonormal eigenbasis of the grid
/// walk: `(max |Gram − I|, max ‖W f_kl − (λ_k + λ_l) f_kl‖)`.
///
/// The grid modes are products of path modes, so both quantities follow from
/// the one-dimensional Gram matrix and path residuals, summed over all
/// `N⁴` entries.
pub fn grid_gram_deviation(n: usize) -> (f64, f64) {
    let g = path_modes(n);
    let gram = g.transpose() * &g;
    let mut gram_dev: f64 = 0.0;
    for k in 0..n {
        for k2 in 0..n {
            for l in 0..n {
                for l2 in 0..n {
                    let target = if k == k2 && l == l2 { 1.0 } else { 0.0 };
                    gram_dev = gram_dev.max((gram[(k, k2)] * gram[(l, l2)] - target).abs());
                }
            }
        }
    }
    let lap = path_laplacian(n);
    let path_res: Vec<f64> = (0..n)
        .map(|k| {
            let col: Vec<f64> = g.column(k).iter().copied().collect();
            let lg = lap.apply_vec(&col);
            lg.iter().zip(&col).map(|(x, y)| (x - lambda_k(n, k) * y).powi(2)).sum::<f64>().sqrt()
        })
        .collect();
    // (L ⊗ I + I ⊗ L) (g_k ⊗ g_l) − (λ_k + λ_l) g_k ⊗ g_l = r_k ⊗ g_l + g_k ⊗ r_l.
    let max_res = path_res.iter().fold(0.0, |m: f64, &r| m.max(r));
    (gram_dev, 2.0 * max_res)
}

/// `Σ_{b=1}^{N} cos(πl(b − ½)/N)`.
pub fn cosine_sum(n: usize, l: usize) -> f64 {
    (1..=n).map(|b| half_cos(n, l, b)).sum()
}

/// `|⟨ψ_kl|H_P|ψ_00⟩|` on a penalized grid, from the closed forms.
pub fn hp_cross_element(n: usize, k: usize, l: usize) -> f64 {
    let nf = n as f64;
    let c = |j: usize| (PI * j as f64 / (2.0 * nf)).cos().abs();
    match (k, l) {
        (0, 0) => (nf - 1.0).powi(2) / (nf * nf),
        (0, j) | (j, 0) => 2f64.sqrt() * (nf - 1.0) / (nf * nf) * c(j),
        _ => 2.0 / (nf * nf) * c(k) * c(l),
    }
}

/// The same element by summing `f_kl f_00` over the sites `a, b ≥ 2`.
pub fn hp_cross_element_direct(n: usize, k: usize, l: usize) -> f64 {
    let mode = GridMode::new(k, l, 0);
    let ground = GridMode::new(0, 0, 0);
    let mut sum = 0.0;
    for a in 2..=n {
        for b in 2..=n {
            sum += mode.amplitude(n, a, b) * ground.amplitude(n, a, b);
        }
    }
    sum.abs()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HpIdentityReport {
    pub n: usize,
    pub max_deviation: f64,
    pub worst_mode: (usize, usize),
    /// Largest `|Σ_b cos(πl(b − ½)/N)|` over `l = 1..N−1`.
    pub max_cosine_sum: f64,
}

pub fn verify_hp_identities(n: usize) -> Result<HpIdentityReport> {
    if n == 0 {
        return Err(invalid("grid size must be positive"));
    }
    if n > HP_DIRECT_MAX {
        return Err(Error::Capacity(format!("direct contraction limited to N ≤ {HP_DIRECT_MAX}")));
    }
    let mut report = HpIdentityReport { n, max_deviation: 0.0, worst_mode: (0, 0), max_cosine_sum: 0.0 };
    for k in 0..n {
        for l in 0..n {
            let d = (hp_cross_element(n, k, l) - hp_cross_element_direct(n, k, l)).abs();
            if d > report.max_deviation {
                report.max_deviation = d;
                report.worst_mode = (k, l);
            }
        }
    }
    report.max_cosine_sum = (1..n).map(|l| cosine_sum(n, l).abs()).fold(0.0, f64::max);
    Ok(report)
}

/// Energy of a Fourier-twisted grid state against the quantity it is
/// bounded by.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaProbe {
    pub n: usize,
    pub period: usize,
    pub m: usize,
    /// `min(m, p − m)`.
    pub m_prime: usize,
    /// `⟨ψ|H_L + H_R + H_B|ψ⟩` for the normalized state.
    pub energy: f64,
    pub c00_sq: f64,
    /// `m′²|c_00|² / (p²N² ln N)`.
    pub bound_quantity: f64,
}

impl LemmaProbe {
    /// `energy / bound_quantity`, infinite when the quantity vanishes.
    pub fn ratio(&self) -> f64 {
        if self.bound_quantity > 0.0 {
            self.energy / self.bound_quantity
        } else {
            f64::INFINITY
        }
    }
}

/// Reusable walk operator for many probes on one `(N, p)`.
pub struct HighmProber {
    n: usize,
    period: usize,
    walk: SparseOperator,
    modes: DMatrix<f64>,
}

impl HighmProber {
    pub fn new(n: usize, period: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("grid size must be at least 2"));
        }
        Ok(Self { n, period, walk: build_walk(n, period)?, modes: path_modes(n) })
    }

    /// `coeffs[k·N + l] = c_kl`; normalized before use.
    pub fn probe(&self, m: usize, coeffs: &[Complex64]) -> Result<LemmaProbe> {
        let (n, p) = (self.n, self.period);
        if m >= p {
            return Err(invalid(format!("Fourier index {m} outside 0..{p}")));
        }
        if coeffs.len() != n * n {
            return Err(invalid(format!("expected {} coefficients, got {}", n * n, coeffs.len())));
        }
        let total: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(invalid("coefficients are not normalizable"));
        }
        let scale = total.sqrt();
        // Grid amplitude Σ_kl c_kl g_k(a) g_l(b) = (G C Gᵀ)(a, b), real and
        // imaginary parts separately.
        let part = |f: fn(&Complex64) -> f64| {
            let c = DMatrix::from_fn(n, n, |k, l| f(&coeffs[k * n + l]) / scale);
            &self.modes * c * self.modes.transpose()
        };
        let (re, im) = (part(|c| c.re), part(|c| c.im));
        let mut x = vec![0.0; p * n * n];
        let mut y = vec![0.0; p * n * n];
        let norm = 1.0 / (p as f64).sqrt();
        for r in 0..p {
            let phase = Complex64::from_polar(norm, 2.0 * std::f64::consts::PI * (m * r) as f64 / p as f64);
            for a in 0..n {
                for b in 0..n {
                    let z = phase * Complex64::new(re[(a, b)], im[(a, b)]);
                    let idx = r * n * n + a * n + b;
                    x[idx] = z.re;
                    y[idx] = z.im;
                }
            }
        }
        let energy = self.walk.quad_form(&x) + self.walk.quad_form(&y);
        let m_prime = m.min(p - m);
        let c00_sq = coeffs[0].norm_sqr() / total;
        let nf = n as f64;
        let bound_quantity = (m_prime * m_prime) as f64 * c00_sq / ((p * p) as f64 * nf * nf * nf.ln());
        Ok(LemmaProbe { n, period: p, m, m_prime, energy, c00_sq, bound_quantity })
    }
}

/// Single probe; the penalty set of `sig` does not enter the walk energy.
pub fn lemma_highm_probe(sig: &ClassSignature, m: usize, coeffs: &[Complex64]) -> Result<LemmaProbe> {
    sig.validate()?;
    HighmProber::new(sig.n, sig.period)?.probe(m, coeffs)
}
