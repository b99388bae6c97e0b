//! Seeded test-matrix generators.
//!
//! All randomness comes from ChaCha8 seeded with a `u64`, and normal draws
//! use `rand_distr`'s ziggurat sampler, so a seed reproduces the same
//! matrix on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::baseline::DenseMatrix;
use crate::provider::KernelSpec;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// I.i.d. standard normal entries.
pub fn randn(m: usize, seed: u64) -> DenseMatrix {
    DenseMatrix::from_vec(m, normals(&mut rng(seed), m * m)).expect("m > 0")
}

/// Standard normal entries plus `m` on the diagonal, which keeps the
/// matrix comfortably invertible.
pub fn randn_shifted(m: usize, seed: u64) -> DenseMatrix {
    let mut out = randn(m, seed);
    for i in 0..m {
        out.set(i, i, out.get(i, i) + m as f64);
    }
    out
}

/// `G·Gᵀ + I` with standard normal G.
pub fn spd(m: usize, seed: u64) -> DenseMatrix {
    let g = randn(m, seed);
    let mut out = g.matmul(&g.transpose());
    for i in 0..m {
        out.set(i, i, out.get(i, i) + 1.0);
    }
    // Exact symmetry; the product's two halves round identically anyway.
    for i in 0..m {
        for j in 0..i {
            out.set(i, j, out.get(j, i));
        }
    }
    out
}

/// `n` standard normal points in `dim` dimensions.
pub fn normal_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..n).map(|_| normals(&mut r, dim)).collect()
}

pub fn lssvm_spec(n: usize, dim: usize, gamma: f64, sigma: f64, seed: u64) -> KernelSpec {
    KernelSpec {
        gamma,
        sigma,
        inputs: normal_points(n, dim, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(randn(6, 42), randn(6, 42));
        assert_ne!(randn(6, 42), randn(6, 43));
        assert_eq!(normal_points(4, 3, 1), normal_points(4, 3, 1));
    }

    #[test]
    fn shift_lands_on_diagonal() {
        let a = randn(5, 9);
        let b = randn_shifted(5, 9);
        for i in 0..5 {
            for j in 0..5 {
                let want = a.get(i, j) + if i == j { 5.0 } else { 0.0 };
                assert_eq!(b.get(i, j), want);
            }
        }
    }

    #[test]
    fn spd_is_symmetric_with_positive_minors() {
        for m in [1, 4, 12] {
            let s = spd(m, 3);
            assert_eq!(s, s.transpose());
            // Cholesky succeeds iff all leading minors are positive.
            let mut l = vec![0.0; m * m];
            for j in 0..m {
                let mut d = s.get(j, j);
                for p in 0..j {
                    d -= l[j * m + p] * l[j * m + p];
                }
                assert!(d > 0.0, "minor {j} of m={m}");
                l[j * m + j] = d.sqrt();
                for i in j + 1..m {
                    let mut v = s.get(i, j);
                    for p in 0..j {
                        v -= l[i * m + p] * l[j * m + p];
                    }
                    l[i * m + j] = v / l[j * m + j];
                }
            }
        }
    }
}
