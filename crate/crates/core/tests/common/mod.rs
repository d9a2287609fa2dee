//! Reference implementations shared by the integration tests. None of them
//! call into the library.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn quick(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        Dd::quick(s.hi, s.lo + self.lo + o.lo)
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        Dd::quick(p, err + self.hi * o.lo + self.lo * o.hi)
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q = self.hi / d;
        let r = self.add(Dd::new(q).mul(Dd::new(-d)));
        Dd::quick(q, r.hi / d)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `J_n(z)` from its power series, summed in double-double.
pub fn bessel_j(n: u32, z: f64) -> f64 {
    let half = Dd::new(z / 2.0);
    let mut term = Dd::new(1.0);
    for k in 1..=n {
        term = term.mul(half).div_f64(k as f64);
    }
    let q = half.mul(half);
    let mut sum = term;
    for k in 1..400u32 {
        term = term.mul(q).div_f64(-((k * (k + n)) as f64));
        sum = sum.add(term);
        if term.to_f64().abs() < 1e-40 && k as f64 > z {
            break;
        }
    }
    sum.to_f64()
}

/// Tridiagonal path Laplacian: degree on the diagonal, `−1` between neighbours.
pub fn path_laplacian_dense(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        m[(i, i)] += 1.0;
        m[(i + 1, i + 1)] += 1.0;
        m[(i, i + 1)] = -1.0;
        m[(i + 1, i)] = -1.0;
    }
    m
}

pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `−Σ λ log₂ λ` over eigenvalues above `1e−14`.
pub fn entropy_bits(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().filter(|&&x| x > 1e-14).map(|&x| -x * x.log2()).sum()
}

/// Reduced density of the right ring of a `3^N · 3^N` state whose left
/// ring occupies the low base-3 digits.
pub fn right_density(n: usize, psi: &[f64]) -> DMatrix<f64> {
    let d = 3usize.pow(n as u32);
    let mut rho = DMatrix::zeros(d, d);
    for j in 0..d {
        for j2 in j..d {
            let s: f64 = (0..d).map(|i| psi[i + d * j] * psi[i + d * j2]).sum();
            rho[(j, j2)] = s;
            rho[(j2, j)] = s;
        }
    }
    rho
}

/// Subsets of size `a` of the `n`-cycle with no two members adjacent,
/// counted by extending a partial choice one site at a time.
pub fn cycle_independent_sets(n: usize, a: usize) -> u64 {
    fn go(n: usize, site: usize, left: usize, first: bool, prev: bool) -> u64 {
        if left == 0 {
            return 1;
        }
        if site == n {
            return 0;
        }
        let mut total = go(n, site + 1, left, first, false);
        let blocked = prev || (site == n - 1 && first && n > 1);
        if !blocked {
            total += go(n, site + 1, left - 1, first || site == 0, true);
        }
        total
    }
    go(n, 0, a, false, false)
}

/// Standard normal pairs by the Box-Muller transform.
pub fn gaussian<R: rand::Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * u2;
    (r * t.cos(), r * t.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        // Abramowitz & Stegun tables.
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 2.0) - 0.576_724_807_756_873_4).abs() < 1e-15);
        assert!((bessel_j(5, 10.0) - (-0.234_061_528_186_793_7)).abs() < 1e-14);
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(cycle_independent_sets(4, 2), 2);
        assert_eq!(cycle_independent_sets(5, 2), 5);
        assert_eq!(cycle_independent_sets(6, 3), 2);
        assert_eq!(cycle_independent_sets(7, 1), 7);
    }
}
