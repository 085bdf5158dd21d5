//! Generators shared by the unit and property tests. Compiled only for tests.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compdata::ComparisonMatrix;
use crate::similarity::SimilarityMatrix;

/// Random partially observed comparison matrix.
pub(crate) fn random_matrix(n: usize, seed: u64, density: f64, ordinal: bool) -> ComparisonMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = ComparisonMatrix::full_consistent(n).unwrap();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < density {
                let v = if ordinal {
                    [-1.0, 0.0, 1.0][rng.gen_range(0..3)]
                } else {
                    rng.gen_range(-1.0..=1.0)
                };
                c.set_comparison(i, j, v).unwrap();
            } else {
                c.delete_comparison(i, j).unwrap();
            }
        }
    }
    c
}

/// Closed-form similarity of the fully consistent tournament: `n - |i - j|`.
pub(crate) fn consistent_similarity(n: usize) -> SimilarityMatrix {
    let values = Array2::from_shape_fn((n, n), |(i, j)| (n as f64) - (i as f64 - j as f64).abs());
    SimilarityMatrix::new(values).unwrap()
}

/// Random Robinson matrix: a nonnegative combination of interval blocks
/// `w * 1_{[a,b] x [a,b]}` is always Robinson, and small integer weights make
/// ties (hence non-strict cases) common.
pub(crate) fn random_r_matrix(n: usize, seed: u64) -> SimilarityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Array2::zeros((n, n));
    let blocks = rng.gen_range(1..=2 * n);
    for _ in 0..blocks {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let w = rng.gen_range(1..=3) as f64;
        for i in lo..=hi {
            for j in lo..=hi {
                values[[i, j]] += w;
            }
        }
    }
    SimilarityMatrix::new(values).unwrap()
}
