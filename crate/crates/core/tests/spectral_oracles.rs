mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ringgap::hamiltonian::sector_hamiltonian;
use ringgap::spectral::{
    eig_dense, eig_lowest, eig_lowest_with, fermion_amplitude, grid_gram_deviation, hastings_bound_log2, lambda_k,
    path_laplacian, HastingsBoundParams, SolverMode,
};
use ringgap::symmetry::{build_effective, necklace_classes};
use ringgap::{BasisTag, ModelParams, Sector, SolverConfig, SparseOperator};

fn random_symmetric(dim: usize, fill: f64, seed: u64) -> SparseOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::new();
    for i in 0..dim {
        triplets.push((i, i, rng.random_range(-2.0..2.0)));
        for j in i + 1..dim {
            if rng.random::<f64>() < fill {
                let v = rng.random_range(-1.0..1.0);
                triplets.push((i, j, v));
                triplets.push((j, i, v));
            }
        }
    }
    SparseOperator::from_triplets(dim, BasisTag::Custom, triplets).unwrap()
}

fn assert_matches_dense(op: &SparseOperator, k: usize, what: &str) {
    let cfg = SolverConfig::default();
    let dense = eig_dense(op, &cfg).unwrap();
    let lanczos = eig_lowest(op, k, 1e-10, 42).unwrap();
    for (i, (a, b)) in lanczos.eigenvalues.iter().zip(&dense.eigenvalues).enumerate() {
        assert!((a - b).abs() < 1e-9, "{what}: level {i} Lanczos {a} dense {b}");
    }
}

#[test]
fn lanczos_matches_dense_on_small_sectors() {
    let params = ModelParams::new(3);
    for sector in Sector::all(3) {
        let h = sector_hamiltonian(&params, sector).unwrap();
        assert_matches_dense(&h, 4.min(h.dim()), &format!("N=3 {sector:?}"));
    }
}

#[test]
fn lanczos_matches_dense_on_effective_classes() {
    for class in necklace_classes(5).unwrap() {
        let h = build_effective(&class.signature()).unwrap();
        assert_matches_dense(&h, 4, &format!("N=5 {:?}", class.canonical));
    }
}

#[test]
fn shift_invert_agrees_with_dense_on_singlet_sector_block() {
    let h = sector_hamiltonian(&ModelParams::new(4), Sector::new(1, 1)).unwrap();
    let cfg = SolverConfig { mode: SolverMode::ShiftInvert, ..SolverConfig::default() };
    let si = eig_lowest_with(&h, 2, &cfg).unwrap();
    let dense = common::sorted_eigenvalues(h.to_dense());
    assert!((si.eigenvalues[0] - dense[0]).abs() < 1e-9);
    assert!((si.eigenvalues[1] - dense[1]).abs() < 1e-9);
}

#[test]
fn path_laplacian_against_oracle() {
    for n in [3, 7, 20] {
        let got = common::sorted_eigenvalues(path_laplacian(n).to_dense());
        let want = common::sorted_eigenvalues(common::path_laplacian_dense(n));
        for k in 0..n {
            assert!((got[k] - want[k]).abs() < 1e-12);
            assert!((lambda_k(n, k) - want[k]).abs() < 1e-12, "N={n} k={k}");
        }
    }
}

#[test]
fn grid_modes_orthonormal_and_diagonalizing() {
    for n in [3, 8, 16, 33] {
        let (gram, res) = grid_gram_deviation(n);
        assert!(gram < 1e-12, "N={n} gram {gram}");
        assert!(res < 1e-12, "N={n} residual {res}");
    }
}

#[test]
fn hastings_ceiling_decreases_with_gap() {
    let at = |delta: f64| hastings_bound_log2(&HastingsBoundParams { delta, d: 3.0, v: 1.0, xi_c: 1.0, c0: 1.0 }).unwrap();
    let mut prev = f64::INFINITY;
    for delta in [1e-6, 1e-4, 1e-2, 1.0] {
        let s = at(delta);
        assert!(s.is_finite() && s <= prev, "Δ={delta}: {s} after {prev}");
        prev = s;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lanczos_matches_dense_on_random_operators(dim in 8usize..120, k in 1usize..5, seed in any::<u64>(), fill in 0.02f64..0.3) {
        let op = random_symmetric(dim, fill, seed);
        let dense = common::sorted_eigenvalues(op.to_dense());
        let lanczos = eig_lowest(&op, k, 1e-10, seed ^ 0x5eed).unwrap();
        for (a, b) in lanczos.eigenvalues.iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
        for r in &lanczos.residuals {
            prop_assert!(*r <= 1e-10);
        }
    }

    #[test]
    fn fermion_amplitude_is_rotated_bessel(x in -25i64..=25, t in 0.0f64..10.0) {
        let a = fermion_amplitude(x, t).unwrap();
        let m = x.unsigned_abs() as u32;
        let j = common::bessel_j(m, 2.0 * t);
        // Jacobi-Anger, with J_{−m} = (−1)^m J_m folding both signs onto i^|x| J_|x|.
        let want = Complex64::i().powi((m % 4) as i32) * j;
        prop_assert!((a - want).norm() < 1e-12, "A({}, {}) = {} want {}", x, t, a, want);
        let mirrored = fermion_amplitude(-x, t).unwrap();
        prop_assert!((a - mirrored).norm() < 1e-12);
    }

    #[test]
    fn path_eigenvalues_dominate_quadratic(n in 1usize..=10_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        let lower = 4.0 * (k * k) as f64 / (n * n) as f64;
        // Equality holds at k = 0 and k = N; allow rounding there.
        prop_assert!(lambda_k(n, k) >= lower * (1.0 - 4.0 * f64::EPSILON), "N={} k={}", n, k);
    }
}
