use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::sparse::SparseOperator;

use super::{residual_norm, SolverConfig, Spectrum};

/// Full spectrum of a small operator.
pub fn eig_dense(op: &SparseOperator, cfg: &SolverConfig) -> Result<Spectrum> {
    if op.dim() > cfg.dense_cap {
        return Err(Error::Capacity(format!(
            "dense solve of dimension {} exceeds the cap {}",
            op.dim(),
            cfg.dense_cap
        )));
    }
    let (values, vectors) = eig_dense_matrix(op.to_dense());
    let residuals = (0..values.len())
        .map(|j| residual_norm(op, values[j], vectors.column(j).as_slice()))
        .collect();
    let ground = (!values.is_empty()).then(|| vectors.column(0).iter().copied().collect());
    Ok(Spectrum::from_pairs(op.dim(), values, residuals, ground))
}

/// Ascending eigenvalues and matching eigenvector columns.
pub fn eig_dense_matrix(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), m);
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}
