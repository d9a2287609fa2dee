//! `(A − σI)⁻¹` through a sparse Cholesky factor in a bandwidth-reducing order.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use nalgebra_sparse::factorization::{CscCholesky, CscSymbolicCholesky};
use nalgebra_sparse::pattern::SparsityPattern;

use crate::error::{Error, Result};
use crate::sparse::{BasisTag, LinearOperator, SparseOperator};

/// Reverse Cuthill–McKee order of the operator's graph, as `perm[old] = new`.
pub fn rcm_ordering(op: &SparseOperator) -> Vec<usize> {
    let n = op.dim();
    let neighbours = |i: usize| op.row(i).0.iter().map(|&c| c as usize).filter(move |&c| c != i);
    let degree: Vec<usize> = (0..n).map(|i| neighbours(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let bfs = |start: usize, visited: &mut Vec<bool>, order: &mut Vec<usize>| {
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = neighbours(v).filter(|&u| !visited[u]).collect();
            next.sort_by_key(|&u| (degree[u], u));
            for u in next {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    };
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // Pseudo-peripheral start: a low-degree node of the last BFS level.
        let mut start = seed;
        let mut depth = 0;
        for _ in 0..4 {
            let (far, d) = farthest(n, start, &neighbours, &degree);
            if d <= depth {
                break;
            }
            depth = d;
            start = far;
        }
        bfs(start, &mut visited, &mut order);
    }
    let mut perm = vec![0; n];
    for (new, &old) in order.iter().rev().enumerate() {
        perm[old] = new;
    }
    perm
}

fn farthest<I: Iterator<Item = usize>>(
    n: usize,
    start: usize,
    neighbours: &impl Fn(usize) -> I,
    degree: &[usize],
) -> (usize, usize) {
    let mut level = vec![usize::MAX; n];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut best = (start, 0);
    while let Some(v) = queue.pop_front() {
        let lv = level[v];
        if lv > best.1 || (lv == best.1 && degree[v] < degree[best.0]) {
            best = (v, lv);
        }
        for u in neighbours(v) {
            if level[u] == usize::MAX {
                level[u] = lv + 1;
                queue.push_back(u);
            }
        }
    }
    best
}

/// Applies `(A − σI)⁻¹` for positive definite `A − σI`.
pub struct ShiftedInverse {
    dim: usize,
    sigma: f64,
    perm: Vec<usize>,
    chol: CscCholesky<f64>,
}

impl ShiftedInverse {
    /// Fails with a capacity error when the factor would hold more than
    /// `budget` entries, and with `NotPositiveDefinite` when `A − σI` is not.
    pub fn new(op: &SparseOperator, sigma: f64, budget: usize) -> Result<Self> {
        let n = op.dim();
        let perm = rcm_ordering(op);
        let pa = op.shifted(-sigma).permuted(&perm, BasisTag::Custom)?;
        // Symmetric, so the CSR arrays are also the CSC arrays.
        let mut offsets = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for i in 0..n {
            let (c, v) = pa.row(i);
            indices.extend(c.iter().map(|&x| x as usize));
            values.extend_from_slice(v);
            offsets.push(indices.len());
        }
        let pattern = SparsityPattern::try_from_offsets_and_indices(n, n, offsets, indices)
            .map_err(|e| Error::InvalidInput(format!("sparsity pattern: {e}")))?;
        let symbolic = CscSymbolicCholesky::factor(pattern);
        let fill = symbolic.l_pattern().nnz();
        if fill > budget {
            return Err(Error::Capacity(format!("Cholesky factor needs {fill} entries, budget {budget}")));
        }
        let chol = CscCholesky::factor_numerical(symbolic, &values).map_err(|_| Error::NotPositiveDefinite {
            pivot: 0,
            value: sigma,
        })?;
        Ok(Self { dim: n, sigma, perm, chol })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn factor_nnz(&self) -> usize {
        self.chol.l().nnz()
    }
}

impl LinearOperator for ShiftedInverse {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut b = DMatrix::zeros(self.dim, 1);
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = x[i];
        }
        self.chol.solve_mut(&mut b);
        for (i, &p) in self.perm.iter().enumerate() {
            y[i] = b[p];
        }
    }
}
