//! Lower bounds for the sectors with other than one hole per ring.
//!
//! On a single ring with `a` holes, `H_L + H_V^L + (a−1)V1` splits as
//! `A1 + A2` with `A1 = H_V^L + (a−1)V1` (the adjacent-hole penalty) and
//! `A2 = H_L` (hopping). Both are positive semidefinite, so a nonzero angle
//! between their kernels bounds the sum from below by `v sin²(θ/2)`, where
//! `v` is the smaller of their lowest nonzero eigenvalues.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{assemble_terms, local_terms, ring_potential, ModelParams, TermKind};
use crate::hilbert::{binomial, check_ring_size, ring_sector_dimension, ring_words, Basis, Ring};
use crate::sparse::{BasisTag, SparseOperator};
use crate::spectral::eig_dense_matrix;

/// Largest ring for the brute-force independent-set count.
pub const BRUTE_FORCE_MAX: usize = 20;
/// Largest single-ring sector diagonalized densely.
pub const RING_DENSE_CAP: usize = 6000;
/// Cross singular values this close to 1 mean the kernels intersect.
pub const INTERSECTION_TOL: f64 = 1e-10;

/// Kernel threshold `1e-10 × max |diagonal|`, or `1e-10` for a zero diagonal.
pub fn kernel_tolerance(op: &SparseOperator) -> f64 {
    let d = op.diagonal().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    1e-10 * if d > 0.0 { d } else { 1.0 }
}

/// Orthonormal kernel basis as columns.
pub fn null_basis(op: &SparseOperator, tol: f64) -> DMatrix<f64> {
    let n = op.dim();
    if op.is_diagonal() {
        let zero: Vec<usize> = op.diagonal().iter().enumerate().filter(|(_, d)| d.abs() <= tol).map(|(i, _)| i).collect();
        return DMatrix::from_fn(n, zero.len(), |r, c| if r == zero[c] { 1.0 } else { 0.0 });
    }
    let (values, vectors) = eig_dense_matrix(op.to_dense());
    let cols: Vec<usize> = (0..n).filter(|&j| values[j].abs() <= tol).collect();
    DMatrix::from_fn(n, cols.len(), |r, c| vectors[(r, cols[c])])
}

/// Smallest eigenvalue above `tol`, `None` when every eigenvalue is zero.
pub fn smallest_nonzero_eigenvalue(op: &SparseOperator, tol: f64) -> Option<f64> {
    if op.is_diagonal() {
        return op.diagonal().into_iter().filter(|d| d.abs() > tol).min_by(f64::total_cmp);
    }
    let (values, _) = eig_dense_matrix(op.to_dense());
    values.into_iter().find(|v| v.abs() > tol)
}

/// Angle data between the spans of two orthonormal column sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalAngles {
    /// Smallest principal angle.
    pub theta: f64,
    pub sin2_theta: f64,
    /// The spans share a nonzero vector; `theta` is reported as 0.
    pub intersecting: bool,
    /// All principal angles, ascending.
    pub angles: Vec<f64>,
}

/// Two subspaces given by orthonormal bases of equal ambient dimension.
#[derive(Clone, Debug)]
pub struct SubspacePair {
    pub basis1: DMatrix<f64>,
    pub basis2: DMatrix<f64>,
}

impl SubspacePair {
    pub fn new(basis1: DMatrix<f64>, basis2: DMatrix<f64>) -> Result<Self> {
        if basis1.nrows() != basis2.nrows() {
            return Err(invalid("bases live in different spaces"));
        }
        for (name, b) in [("first", &basis1), ("second", &basis2)] {
            let dev = (b.transpose() * b - DMatrix::identity(b.ncols(), b.ncols())).amax();
            if dev > 1e-12 {
                return Err(invalid(format!("{name} basis is not orthonormal (deviation {dev:e})")));
            }
        }
        Ok(Self { basis1, basis2 })
    }

    pub fn principal_angles(&self) -> Result<PrincipalAngles> {
        principal_angle(&self.basis1, &self.basis2)
    }
}

/// Angles from the singular values of `B1ᵀ B2`.
pub fn principal_angle(basis1: &DMatrix<f64>, basis2: &DMatrix<f64>) -> Result<PrincipalAngles> {
    if basis1.ncols() == 0 || basis2.ncols() == 0 {
        return Err(invalid("principal angles need two nonempty bases"));
    }
    if basis1.nrows() != basis2.nrows() {
        return Err(invalid("bases live in different spaces"));
    }
    let cross = basis1.transpose() * basis2;
    let mut sigma: Vec<f64> = cross.singular_values().iter().map(|s| s.min(1.0)).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    let angles: Vec<f64> = sigma.iter().map(|s| s.acos()).collect();
    let top = sigma[0];
    let intersecting = top >= 1.0 - INTERSECTION_TOL;
    let theta = if intersecting { 0.0 } else { top.acos() };
    Ok(PrincipalAngles { theta, sin2_theta: 1.0 - top * top, intersecting, angles })
}

/// `v sin²(θ/2)`.
pub fn kitaev_bound(v: f64, theta: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("eigenvalue scale must be positive, got {v}")));
    }
    if !(0.0..=FRAC_PI_2 + 1e-15).contains(&theta) {
        return Err(invalid(format!("angle {theta} outside [0, π/2]")));
    }
    Ok(v * (theta / 2.0).sin().powi(2))
}

/// Hole placements on the `N`-cycle with no two holes adjacent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonadjacentCount {
    pub n: usize,
    pub a: usize,
    /// Brute force for `N ≤ 20`, otherwise the closed form.
    pub exact: u64,
    /// `N/(N−a) · C(N−a, a)`.
    pub closed_form: u64,
    /// `N(N−2)(N−4)⋯(N−2a+2)/a!`.
    pub paper_bound: f64,
    /// `C(N, a)(1 − 1/(N−1))`.
    pub subspace_bound: f64,
}

pub fn count_nonadjacent(n: usize, a: usize) -> Result<NonadjacentCount> {
    if n < 2 {
        return Err(invalid(format!("ring size {n} too small")));
    }
    let closed_form = if a == 0 {
        1
    } else if 2 * a > n {
        0
    } else {
        // N/(N−a)·C(N−a, a) = C(N−a, a) + C(N−a−1, a−1).
        binomial(n - a, a) + binomial(n - a - 1, a - 1)
    };
    let exact = if n <= BRUTE_FORCE_MAX {
        let full = (1u64 << n) - 1;
        (0u64..1 << n)
            .filter(|&s| s.count_ones() as usize == a)
            .filter(|&s| {
                let rot = ((s << 1) | (s >> (n - 1))) & full;
                s & rot == 0
            })
            .count() as u64
    } else {
        closed_form
    };
    let mut paper_bound = 1.0;
    for j in 0..a {
        paper_bound *= (n as f64 - 2.0 * j as f64) / (j + 1) as f64;
    }
    let subspace_bound = binomial(n, a) as f64 * (1.0 - 1.0 / (n as f64 - 1.0));
    Ok(NonadjacentCount { n, a, exact, closed_form, paper_bound, subspace_bound })
}

/// One ring with `a` holes, embedded as the left ring with the right ring
/// holding qubits `0`.
pub fn ring_basis(n: usize, a: usize) -> Result<Basis> {
    check_ring_size(n)?;
    if a > n {
        return Err(invalid(format!("{a} holes on a ring of {n}")));
    }
    Basis::listed(n, BasisTag::Ring { holes: a }, ring_words(n, a))
}

/// `H_L` on one ring.
pub fn ring_hopping(params: &ModelParams, a: usize) -> Result<SparseOperator> {
    assemble_terms(&local_terms(TermKind::LeftHop, params.n), params, &ring_basis(params.n, a)?)
}

/// `H_V^L` on one ring.
pub fn ring_hole_potential(params: &ModelParams, a: usize) -> Result<SparseOperator> {
    assemble_terms(&ring_potential(Ring::Left, params.n), params, &ring_basis(params.n, a)?)
}

/// Bound data for `H_L + H_V^L` on a ring with `a ≠ 1` holes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorBoundReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub a: usize,
    pub exact_count: u64,
    pub paper_bound: f64,
    /// `None` when one of the two kernels is empty.
    pub sin2_theta: Option<f64>,
    pub v: Option<f64>,
    pub kitaev_bound: Option<f64>,
    pub numeric_min: f64,
    /// Bound on `H_L + H_V^L` itself: `v sin²(θ/2) − (a−1)V1`, or `V1` at `a = 0`.
    pub lower_bound: f64,
    pub kernels_intersect: bool,
}

pub fn sector_lower_bound(n: usize, a: usize, params: &ModelParams) -> Result<SectorBoundReport> {
    params.validate()?;
    if params.n != n {
        return Err(invalid("ring size disagrees with params"));
    }
    if a == 1 {
        return Err(invalid("the one-hole ring is handled by the grid walk"));
    }
    let dim = ring_sector_dimension(n, a) as usize;
    if dim > RING_DENSE_CAP {
        return Err(Error::Capacity(format!("ring sector of dimension {dim} above {RING_DENSE_CAP}")));
    }
    let hop = ring_hopping(params, a)?;
    let pot = ring_hole_potential(params, a)?;
    let total = hop.add(&pot)?;
    let (values, _) = eig_dense_matrix(total.to_dense());
    let numeric_min = values[0];
    let count = count_nonadjacent(n, a)?;
    let mut report = SectorBoundReport {
        n,
        a,
        exact_count: count.exact,
        paper_bound: count.paper_bound,
        sin2_theta: None,
        v: None,
        kitaev_bound: None,
        numeric_min,
        lower_bound: params.v1,
        kernels_intersect: false,
    };
    if a == 0 {
        return Ok(report);
    }
    let offset = (a as f64 - 1.0) * params.v1;
    let a1 = pot.shifted(offset);
    let a2 = hop;
    let (t1, t2) = (kernel_tolerance(&a1), kernel_tolerance(&a2));
    let (k1, k2) = (null_basis(&a1, t1), null_basis(&a2, t2));
    let v = match (smallest_nonzero_eigenvalue(&a1, t1), smallest_nonzero_eigenvalue(&a2, t2)) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return Ok(report),
    };
    // An empty kernel puts every vector at angle π/2 from it.
    let (theta, sin2) = if k1.ncols() == 0 || k2.ncols() == 0 {
        (FRAC_PI_2, 1.0)
    } else {
        let angles = principal_angle(&k1, &k2)?;
        report.kernels_intersect = angles.intersecting;
        (angles.theta, angles.sin2_theta)
    };
    let kb = kitaev_bound(v, theta)?;
    report.sin2_theta = Some(sin2);
    report.v = Some(v);
    report.kitaev_bound = Some(kb);
    report.lower_bound = kb - offset;
    Ok(report)
}

/// Gap of `H_L` with one hole and a fixed qubit word `background` (bit `i`
/// is the `i`-th qubit from site 1 onward).
pub fn single_hole_gap(n: usize, background: u64) -> Result<f64> {
    check_ring_size(n)?;
    if background >> (n - 1) != 0 {
        return Err(invalid(format!("background needs {} bits", n - 1)));
    }
    let states: Vec<u64> = (1..=n)
        .map(|hole| {
            let mut q = 0;
            (1..=n)
                .map(|site| {
                    let trit = if site == hole {
                        2
                    } else {
                        let bit = (background >> q) & 1;
                        q += 1;
                        bit
                    };
                    trit * crate::hilbert::pow3(site - 1)
                })
                .sum()
        })
        .collect();
    let params = ModelParams::new(n);
    let basis = Basis::listed(n, BasisTag::Custom, states)?;
    let h = assemble_terms(&local_terms(TermKind::LeftHop, n), &params, &basis)?;
    let (values, _) = eig_dense_matrix(h.to_dense());
    Ok(values[1] - values[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> SparseOperator {
        SparseOperator::from_triplets(values.len(), BasisTag::Custom, values.iter().enumerate().map(|(i, &v)| (i, i, v)))
            .unwrap()
    }

    #[test]
    fn kernels_of_simple_operators() {
        assert_eq!(null_basis(&SparseOperator::zeros(4, BasisTag::Custom), 1e-10).ncols(), 4);
        assert_eq!(null_basis(&diag(&[0.0, 0.0, 1.0]), 1e-10).ncols(), 2);
    }

    #[test]
    fn angle_edge_cases() {
        let e = |i: usize| DMatrix::from_fn(3, 1, |r, _| if r == i { 1.0 } else { 0.0 });
        let same = principal_angle(&e(0), &e(0)).unwrap();
        assert!(same.intersecting);
        assert_eq!(same.theta, 0.0);
        let orth = principal_angle(&e(0), &e(1)).unwrap();
        assert!((orth.theta - FRAC_PI_2).abs() < 1e-15);
        assert!((orth.sin2_theta - 1.0).abs() < 1e-15);
        assert!(principal_angle(&DMatrix::zeros(3, 0), &e(1)).is_err());
    }

    #[test]
    fn kitaev_examples() {
        assert!((kitaev_bound(1.0, FRAC_PI_2).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(kitaev_bound(1.0, 0.0).unwrap(), 0.0);
        assert!(kitaev_bound(0.0, 1.0).is_err());
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_nonadjacent(7, 1).unwrap().exact, 7);
        assert_eq!(count_nonadjacent(4, 2).unwrap().exact, 2);
        let c = count_nonadjacent(5, 2).unwrap();
        assert_eq!(c.exact, 5);
        assert!((c.paper_bound - 7.5).abs() < 1e-12);
        assert_eq!(count_nonadjacent(5, 3).unwrap().exact, 0);
    }

    #[test]
    fn two_hole_hopping_kernel_is_one_per_background() {
        let n = 5;
        let p = ModelParams::new(n);
        let hop = ring_hopping(&p, 2).unwrap();
        assert_eq!(hop.dim(), 80);
        let kernel = null_basis(&hop, kernel_tolerance(&hop));
        assert_eq!(kernel.ncols(), 1 << (n - 2));
        // Uniform superposition over hole placements of each qubit word.
        let basis = ring_basis(n, 2).unwrap();
        let word_of = |idx: u64| -> u64 {
            let mut w = 0;
            let mut q = 0;
            for s in 0..n {
                let t = crate::hilbert::digit(idx, s);
                if t != 2 {
                    w |= (t as u64) << q;
                    q += 1;
                }
            }
            w
        };
        for word in 0..1u64 << (n - 2) {
            let v: Vec<f64> = (0..basis.dim()).map(|k| (word_of(basis.state(k)) == word) as u8 as f64).collect();
            assert!(hop.apply_vec(&v).iter().all(|x| x.abs() < 1e-14));
            let coeffs = kernel.transpose() * nalgebra::DVector::from_vec(v.clone());
            let norm2: f64 = v.iter().map(|x| x * x).sum();
            assert!((coeffs.norm_squared() - norm2).abs() < 1e-10);
        }
    }

    #[test]
    fn empty_ring_sits_at_v1() {
        let p = ModelParams::new(4);
        let r = sector_lower_bound(4, 0, &p).unwrap();
        assert!((r.numeric_min - p.v1).abs() < 1e-16);
        assert!(sector_lower_bound(4, 1, &p).is_err());
    }

    #[test]
    fn single_hole_gap_is_path_gap() {
        for n in 3..=8 {
            let expect = 2.0 * (1.0 - (std::f64::consts::PI / n as f64).cos());
            assert!((single_hole_gap(n, 0b1).unwrap() - expect).abs() < 1e-10);
        }
    }
}
