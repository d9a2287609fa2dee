//! Restarted Lanczos with full reorthogonalization.
//!
//! The projected matrix is formed explicitly from stored products `A v_i`,
//! which keeps restarts simple: a restart keeps the best Ritz vectors and
//! continues from the Lanczos residual. Converged pairs of one pass are
//! locked, and a second pass on their complement checks for eigenvalues the
//! first pass missed (degenerate copies a single start vector cannot see).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::sparse::{LinearOperator, SparseOperator};

use super::dense::eig_dense_matrix;
use super::factor::ShiftedInverse;
use super::{dot, norm, residual_norm, SolverConfig, SolverMode, Spectrum};

/// Dimension below which `Auto` skips shift-invert.
const SHIFT_INVERT_MIN_DIM: usize = 400;

/// Lowest `k` eigenpairs with default settings apart from `tol` and `seed`.
pub fn eig_lowest(op: &SparseOperator, k: usize, tol: f64, seed: u64) -> Result<Spectrum> {
    eig_lowest_with(op, k, &SolverConfig { tol, seed, ..Default::default() })
}

pub fn eig_lowest_with(op: &SparseOperator, k: usize, cfg: &SolverConfig) -> Result<Spectrum> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(invalid(format!("cannot compute {k} eigenpairs of a {n}-dimensional operator")));
    }
    if !(cfg.tol > 0.0) {
        return Err(invalid("solver tolerance must be positive"));
    }
    let use_si = match cfg.mode {
        SolverMode::Plain => false,
        SolverMode::ShiftInvert => true,
        SolverMode::Auto => n >= SHIFT_INVERT_MIN_DIM,
    };
    if use_si {
        let scale = op.norm_bound().max(1.0);
        let sigma = -1e-10 * scale;
        match ShiftedInverse::new(op, sigma, cfg.factor_budget) {
            Ok(inv) => match solve(op, Some(&inv), k, cfg) {
                Err(Error::Convergence { .. }) if cfg.mode == SolverMode::Auto => {}
                other => return other,
            },
            Err(e) if cfg.mode == SolverMode::ShiftInvert => return Err(e),
            // Not PSD or too much fill: fall back to the plain iteration.
            Err(_) => {}
        }
    }
    solve(op, None, k, cfg)
}

struct Pair {
    value: f64,
    vector: Vec<f64>,
}

fn solve(op: &SparseOperator, inv: Option<&ShiftedInverse>, k: usize, cfg: &SolverConfig) -> Result<Spectrum> {
    let n = op.dim();
    let mut matvecs = 0usize;
    let mut locked: Vec<Pair> = Vec::new();
    let mut pass_seed = cfg.seed;
    let mut want = k;
    // First pass finds k pairs; each later pass looks for one more below
    // the current k-th value in the complement of everything found.
    loop {
        let found = krylov_pass(op, inv, &locked, want, cfg, pass_seed, &mut matvecs)?;
        pass_seed = pass_seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        if locked.is_empty() {
            locked = found;
        } else {
            let top = locked.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
            let Some(candidate) = found.into_iter().next() else { break };
            if candidate.value >= top - cfg.tol || locked.len() + 1 > n {
                break;
            }
            locked.push(candidate);
            locked.sort_by(|a, b| a.value.total_cmp(&b.value));
            locked.truncate(k);
        }
        if locked.len() >= n {
            break;
        }
        want = 1;
    }
    let pairs = rayleigh_ritz(op, locked);
    let residuals: Vec<f64> = pairs.iter().map(|p| residual_norm(op, p.value, &p.vector)).collect();
    if residuals.iter().any(|&r| !(r <= cfg.tol)) {
        return Err(Error::Convergence { matvecs, residuals });
    }
    let values = pairs.iter().map(|p| p.value).collect();
    let ground = pairs.into_iter().next().map(|p| p.vector);
    Ok(Spectrum::from_pairs(n, values, residuals, ground))
}

/// Diagonalize `A` on the span of the found vectors; fixes mixing between
/// close pairs and returns Rayleigh quotients of `A` itself.
fn rayleigh_ritz(op: &SparseOperator, pairs: Vec<Pair>) -> Vec<Pair> {
    let q = orthonormalize(pairs.into_iter().map(|p| p.vector).collect());
    let aq: Vec<Vec<f64>> = q.iter().map(|v| op.apply_vec(v)).collect();
    let m = q.len();
    let h = DMatrix::from_fn(m, m, |i, j| 0.5 * (dot(&q[i], &aq[j]) + dot(&q[j], &aq[i])));
    let (values, y) = eig_dense_matrix(h);
    values
        .into_iter()
        .enumerate()
        .map(|(c, value)| {
            let mut v = vec![0.0; op.dim()];
            for (i, qi) in q.iter().enumerate() {
                axpy(y[(i, c)], qi, &mut v);
            }
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            Pair { value, vector: v }
        })
        .collect()
}

fn orthonormalize(vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        for _ in 0..2 {
            for u in &out {
                let c = dot(u, &v);
                axpy(-c, u, &mut v);
            }
        }
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        out.push(v);
    }
    out
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

/// Project out `basis` twice; returns the remaining norm.
fn project_out<'a>(v: &mut [f64], basis: impl Iterator<Item = &'a Vec<f64>> + Clone) -> f64 {
    for _ in 0..2 {
        for u in basis.clone() {
            let c = dot(u, v);
            axpy(-c, u, v);
        }
    }
    norm(v)
}

/// One restarted Lanczos run for the `want` lowest pairs of `op` on the
/// orthogonal complement of `locked`. With `inv` the iteration runs on
/// `(A − σ)⁻¹` and wants its largest values.
fn krylov_pass(
    op: &SparseOperator,
    inv: Option<&ShiftedInverse>,
    locked: &[Pair],
    want: usize,
    cfg: &SolverConfig,
    seed: u64,
    matvecs: &mut usize,
) -> Result<Vec<Pair>> {
    let n = op.dim();
    let free = n - locked.len();
    let want = want.min(free);
    if want == 0 {
        return Ok(Vec::new());
    }
    let m = if cfg.basis_size > 0 { cfg.basis_size } else { (2 * want + 30).max(40) }.min(free).max(want);
    let iter_op: &dyn LinearOperator = match inv {
        Some(inv) => inv,
        None => op,
    };
    let a_minus_sigma = inv.map(|i| op.norm_bound() - i.sigma());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let locked_vecs: Vec<&Vec<f64>> = locked.iter().map(|p| &p.vector).collect();

    let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut av: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut h: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut w = random_unit(n, &mut rng);
    let mut best_res = Vec::new();

    for _restart in 0..cfg.max_iter.max(1) {
        while v.len() < m {
            let before = norm(&w);
            let mut nw = project_out(&mut w, locked_vecs.iter().copied().chain(v.iter()));
            if nw <= 1e-10 * before.max(1e-300) {
                // Invariant subspace reached: continue from a fresh direction.
                w = random_unit(n, &mut rng);
                nw = project_out(&mut w, locked_vecs.iter().copied().chain(v.iter()));
                if nw <= 1e-10 {
                    break;
                }
            }
            w.iter_mut().for_each(|x| *x /= nw);
            let mut aw = vec![0.0; n];
            iter_op.apply(&w, &mut aw);
            *matvecs += 1;
            let col: Vec<f64> = v.iter().chain(std::iter::once(&w)).map(|u| dot(u, &aw)).collect();
            for (i, row) in h.iter_mut().enumerate() {
                row.push(col[i]);
            }
            h.push(col);
            v.push(std::mem::take(&mut w));
            w = aw.clone();
            av.push(aw);
        }
        let j = v.len();
        let proj = DMatrix::from_fn(j, j, |r, c| 0.5 * (h[r][c] + h[c][r]));
        let (theta, y) = eig_dense_matrix(proj);
        // Preference order: lowest for A, largest for the inverse.
        let order: Vec<usize> = if inv.is_some() { (0..j).rev().collect() } else { (0..j).collect() };
        let ritz = |c: usize| -> (Vec<f64>, Vec<f64>) {
            let mut x = vec![0.0; n];
            let mut ax = vec![0.0; n];
            for i in 0..j {
                axpy(y[(i, c)], &v[i], &mut x);
                axpy(y[(i, c)], &av[i], &mut ax);
            }
            (x, ax)
        };
        let mut done = Vec::with_capacity(want);
        let mut all_ok = true;
        best_res.clear();
        for &c in order.iter().take(want) {
            let (x, ax) = ritz(c);
            let r: f64 = ax.iter().zip(&x).map(|(a, b)| (a - theta[c] * b).powi(2)).sum::<f64>().sqrt();
            let (value, ok) = match a_minus_sigma {
                None => (theta[c], r <= 0.5 * cfg.tol),
                Some(scale) => {
                    let value = inv.map(|i| i.sigma()).unwrap_or(0.0) + 1.0 / theta[c];
                    let bound_ok = r <= 0.5 * cfg.tol * theta[c].abs() / scale;
                    // Rounding in the solves can stall the inverse residual;
                    // the residual of A itself decides then.
                    let ok = bound_ok || residual_norm(op, dot(&x, &op.apply_vec(&x)), &x) <= 0.5 * cfg.tol;
                    (value, ok)
                }
            };
            best_res.push(r);
            all_ok &= ok;
            done.push(Pair { value, vector: x });
        }
        if all_ok || j + locked.len() >= n {
            return Ok(done);
        }
        // Lanczos residual of the newest vector, before the basis shrinks.
        let mut f = av[j - 1].clone();
        for (i, vi) in v.iter().enumerate() {
            axpy(-h[i][j - 1], vi, &mut f);
        }
        let keep = (want + (m - want) / 3).max(want).min(j.saturating_sub(1)).max(1);
        let kept: Vec<usize> = order.iter().copied().take(keep).collect();
        let nv: Vec<Vec<f64>> = kept.iter().map(|&c| ritz(c).0).collect();
        // Re-orthonormalize the kept block against rounding drift.
        let q = orthonormalize(nv);
        let qa: Vec<Vec<f64>> = q
            .iter()
            .map(|qi| {
                let mut a = vec![0.0; n];
                iter_op.apply(qi, &mut a);
                a
            })
            .collect();
        *matvecs += q.len();
        h = (0..q.len()).map(|r| (0..q.len()).map(|c| dot(&q[r], &qa[c])).collect()).collect();
        v = q;
        av = qa;
        w = f;
    }
    Err(Error::Convergence { matvecs: *matvecs, residuals: best_res })
}
