//! Real symmetric sparse operators.
//!
//! Storage is compressed rows holding both triangles so that products are a
//! single pass; the logical content (and the text format) is the upper
//! triangle `row ≤ col`.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::Sector;

/// Rows per rayon task in products; below this the product runs serially.
const PAR_ROWS: usize = 4096;

/// What the rows and columns of an operator refer to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisTag {
    Full,
    Sector(Sector),
    /// Grid-walk basis `|a,b,r⟩` of one invariant class.
    Effective { period: usize, bad_set: Vec<usize> },
    /// One ring with a fixed number of holes.
    Ring { holes: usize },
    /// Nine-state brick chain.
    Chain,
    Custom,
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisTag::Full => write!(f, "full"),
            BasisTag::Sector(s) => write!(f, "sector({},{})", s.left, s.right),
            BasisTag::Effective { period, bad_set } => {
                let bad: Vec<String> = bad_set.iter().map(|r| r.to_string()).collect();
                write!(f, "effective(p={period};bad={})", bad.join(","))
            }
            BasisTag::Ring { holes } => write!(f, "ring(a={holes})"),
            BasisTag::Chain => write!(f, "chain"),
            BasisTag::Custom => write!(f, "custom"),
        }
    }
}

impl FromStr for BasisTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognized basis tag '{s}'"));
        let inner = |prefix: &str| -> Option<&str> {
            s.strip_prefix(prefix).and_then(|r| r.strip_suffix(')'))
        };
        match s {
            "full" => return Ok(BasisTag::Full),
            "chain" => return Ok(BasisTag::Chain),
            "custom" => return Ok(BasisTag::Custom),
            _ => {}
        }
        if let Some(body) = inner("sector(") {
            let (a, b) = body.split_once(',').ok_or_else(bad)?;
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Ok(BasisTag::Sector(Sector::new(a, b)));
        }
        if let Some(body) = inner("ring(a=") {
            return Ok(BasisTag::Ring { holes: body.parse().map_err(|_| bad())? });
        }
        if let Some(body) = inner("effective(p=") {
            let (p, rest) = body.split_once(";bad=").ok_or_else(bad)?;
            let period = p.parse().map_err(|_| bad())?;
            let bad_set = if rest.is_empty() {
                Vec::new()
            } else {
                rest.split(',').map(|r| r.parse().map_err(|_| bad())).collect::<Result<_>>()?
            };
            return Ok(BasisTag::Effective { period, bad_set });
        }
        Err(bad())
    }
}

/// Anything that can multiply a vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Hermitian (real symmetric) sparse operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    tag: BasisTag,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl SparseOperator {
    pub fn zeros(dim: usize, tag: BasisTag) -> Self {
        Self { dim, tag, row_ptr: vec![0; dim + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    /// Build from one entry list per row. Duplicate columns are summed and
    /// exact zeros dropped. The caller supplies both triangles.
    pub fn from_rows(dim: usize, tag: BasisTag, rows: Vec<Vec<(u32, f64)>>) -> Result<Self> {
        if rows.len() != dim {
            return Err(invalid(format!("{} rows for dimension {dim}", rows.len())));
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for mut row in rows {
            row.sort_unstable_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                if c as usize >= dim {
                    return Err(invalid(format!("column {c} out of range {dim}")));
                }
                let mut v = 0.0;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if !v.is_finite() {
                    return Err(invalid(format!("non-finite entry at column {c}")));
                }
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { dim, tag, row_ptr, col_idx, values })
    }

    /// Build from full-matrix triplets.
    pub fn from_triplets(
        dim: usize,
        tag: BasisTag,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut rows = vec![Vec::new(); dim];
        for (i, j, v) in triplets {
            if i >= dim || j >= dim {
                return Err(invalid(format!("entry ({i},{j}) out of range {dim}")));
            }
            rows[i].push((j as u32, v));
        }
        Self::from_rows(dim, tag, rows)
    }

    /// Build from upper-triangle entries (`row ≤ col`), mirroring them.
    pub fn from_upper(
        dim: usize,
        tag: BasisTag,
        upper: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut rows = vec![Vec::new(); dim];
        for (i, j, v) in upper {
            if i > j {
                return Err(invalid(format!("entry ({i},{j}) below the diagonal")));
            }
            if j >= dim {
                return Err(invalid(format!("entry ({i},{j}) out of range {dim}")));
            }
            rows[i].push((j as u32, v));
            if i != j {
                rows[j].push((i as u32, v));
            }
        }
        Self::from_rows(dim, tag, rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> &BasisTag {
        &self.tag
    }

    pub fn with_tag(mut self, tag: BasisTag) -> Self {
        self.tag = tag;
        self
    }

    /// Stored nonzeros of both triangles.
    pub fn nnz_full(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros of the upper triangle, the logical entry count.
    pub fn nnz(&self) -> usize {
        self.upper_entries().count()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Entries with `row ≤ col`, row-major.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals)
                .filter(move |(&c, _)| c as usize >= i)
                .map(move |(&c, &v)| (i, c as usize, v))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| self.row(i).0.iter().all(|&c| c as usize == i))
    }

    /// Exact (bitwise) symmetry of the stored matrix.
    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).all(|(&c, &v)| self.get(c as usize, i) == v)
        })
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let row_dot = |i: usize| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(|(&c, &v)| v * x[c as usize]).sum::<f64>()
        };
        if self.dim >= 2 * PAR_ROWS {
            y.par_chunks_mut(PAR_ROWS).enumerate().for_each(|(chunk, ys)| {
                let base = chunk * PAR_ROWS;
                for (k, yi) in ys.iter_mut().enumerate() {
                    *yi = row_dot(base + k);
                }
            });
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = row_dot(i);
            }
        }
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec(x, &mut y);
        y
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let y = self.apply_vec(x);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.apply_vec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        if self.dim != other.dim {
            return Err(invalid(format!("dimension mismatch {} vs {}", self.dim, other.dim)));
        }
        let rows = (0..self.dim)
            .map(|i| {
                let (c1, v1) = self.row(i);
                let (c2, v2) = other.row(i);
                c1.iter()
                    .copied()
                    .zip(v1.iter().copied())
                    .chain(c2.iter().copied().zip(v2.iter().copied()))
                    .collect()
            })
            .collect();
        Self::from_rows(self.dim, self.tag.clone(), rows)
    }

    pub fn scaled(&self, factor: f64) -> SparseOperator {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        if factor == 0.0 {
            return Self::zeros(self.dim, self.tag.clone());
        }
        out
    }

    /// `A + shift·I`.
    pub fn shifted(&self, shift: f64) -> SparseOperator {
        let rows = (0..self.dim)
            .map(|i| {
                let (c, v) = self.row(i);
                let mut r: Vec<(u32, f64)> = c.iter().copied().zip(v.iter().copied()).collect();
                r.push((i as u32, shift));
                r
            })
            .collect();
        Self::from_rows(self.dim, self.tag.clone(), rows).expect("same shape")
    }

    /// `P A Pᵀ` where `perm[i]` is the new position of old position `i`.
    pub fn permuted(&self, perm: &[usize], tag: BasisTag) -> Result<SparseOperator> {
        if perm.len() != self.dim {
            return Err(invalid("permutation length mismatch"));
        }
        let mut rows = vec![Vec::new(); self.dim];
        let mut hit = vec![false; self.dim];
        for (i, &pi) in perm.iter().enumerate() {
            if pi >= self.dim || std::mem::replace(&mut hit[pi], true) {
                return Err(invalid("not a permutation"));
            }
            let (cols, vals) = self.row(i);
            rows[pi] = cols.iter().zip(vals).map(|(&c, &v)| (perm[c as usize] as u32, v)).collect();
        }
        Self::from_rows(self.dim, tag, rows)
    }

    /// Principal submatrix on the given positions, in the given order.
    pub fn restrict(&self, positions: &[usize], tag: BasisTag) -> Result<SparseOperator> {
        let mut new_pos = vec![u32::MAX; self.dim];
        for (k, &p) in positions.iter().enumerate() {
            if p >= self.dim {
                return Err(invalid(format!("position {p} out of range")));
            }
            new_pos[p] = k as u32;
        }
        let rows = positions
            .iter()
            .map(|&p| {
                let (cols, vals) = self.row(p);
                cols.iter()
                    .zip(vals)
                    .filter(|(&c, _)| new_pos[c as usize] != u32::MAX)
                    .map(|(&c, &v)| (new_pos[c as usize], v))
                    .collect()
            })
            .collect();
        Self::from_rows(positions.len(), tag, rows)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                m[(i, c as usize)] = v;
            }
        }
        m
    }

    /// Coordinate text: `dim nnz basis_tag`, then `row col value` for the
    /// upper triangle with 17 significant digits.
    pub fn write_coo<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.dim, self.nnz(), self.tag)?;
        for (i, j, v) in self.upper_entries() {
            writeln!(w, "{i} {j} {v:.16e}")?;
        }
        Ok(())
    }

    pub fn read_coo<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))??;
        let mut parts = header.split_whitespace();
        let mut field = |name: &str| {
            parts.next().ok_or_else(|| Error::Parse(format!("header missing {name}")))
        };
        let dim: usize = field("dim")?.parse().map_err(|_| Error::Parse("bad dim".into()))?;
        let nnz: usize = field("nnz")?.parse().map_err(|_| Error::Parse("bad nnz".into()))?;
        let tag: BasisTag = field("basis tag")?.parse()?;
        let mut entries = Vec::with_capacity(nnz);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("bad entry line '{line}'")));
            }
            let p = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad index '{s}'")));
            let v: f64 = f[2].parse().map_err(|_| Error::Parse(format!("bad value '{}'", f[2])))?;
            entries.push((p(f[0])?, p(f[1])?, v));
        }
        if entries.len() != nnz {
            return Err(Error::Parse(format!("header says {nnz} entries, found {}", entries.len())));
        }
        Self::from_upper(dim, tag, entries)
    }
}

impl LinearOperator for SparseOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}
