//! Pairwise similarity constructions and Robinson-matrix structure checks.
//!
//! The central object is the match-count similarity: item pairs are similar
//! when they compare the same way against common reference items,
//!
//! ```text
//! S[i][j] = sum_k (1 + C[i][k] * C[j][k]) / 2,
//! ```
//!
//! so an unmatched or missing reference contributes 1/2. On a fully observed
//! consistent tournament this gives exactly `S[i][j] = n - |i - j|`, a strict
//! Robinson matrix whose spectral ordering is the true ranking. The other
//! constructions (debiased, generalized-linear, cardinal, contrast) are
//! variations on the same theme for noisy, repeated or cardinal data.
//!
//! A *Robinson matrix* (R-matrix) is symmetric with entries nondecreasing
//! toward the diagonal along every row and column of the lower triangle. It
//! is *strict* when the identity and the full reversal are the only
//! permutations that keep it Robinson; [`check_r`] decides strictness by an
//! O(n^2) interval scan, [`check_r_brute`] by enumerating permutations.

use ndarray::Array2;

use crate::compdata::{ComparisonMatrix, MultiComparison};
use crate::error::{Error, Result};

/// Absolute tolerance for entry comparisons inside the Robinson checks.
/// Exact-integer constructions stay well inside it; half-integer shifts from
/// deleted comparisons do too.
pub const R_EQ_TOL: f64 = 1e-9;

/// Symmetric similarity matrix.
///
/// The standard constructors produce nonnegative entries; the debiased
/// estimator from [`sim_match_debiased`] divides by a small factor and may go
/// negative under heavy noise, which downstream spectral code tolerates.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Array2<f64>,
}

impl SimilarityMatrix {
    /// Validates shape, symmetry and nonnegativity.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let s = Self::new_signed(values)?;
        for ((i, j), &v) in s.values.indexed_iter() {
            if v < 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "similarity ({i}, {j}) = {v} is negative"
                )));
            }
        }
        Ok(s)
    }

    /// Validates shape and symmetry only; entries may be negative.
    pub fn new_signed(values: Array2<f64>) -> Result<Self> {
        let n = values.nrows();
        if n < 2 {
            return Err(Error::TooSmall { n, min: 2 });
        }
        if values.ncols() != n {
            return Err(Error::InvalidMatrix(format!(
                "similarity not square: {} x {}",
                n,
                values.ncols()
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (values[[i, j]], values[[j, i]]);
                if !a.is_finite() || a != b {
                    return Err(Error::InvalidMatrix(format!(
                        "similarity not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    /// Relabel items: entry `(i, j)` of the result is `(perm[i], perm[j])` of
    /// `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: "permutation",
                expected: self.n,
                got: perm.len(),
            });
        }
        let values = Array2::from_shape_fn((self.n, self.n), |(i, j)| {
            self.values[[perm[i], perm[j]]]
        });
        Self::new_signed(values)
    }

    /// CSV dump mirroring the comparison export: label header, dense body.
    pub fn to_csv(&self, labels: Option<&[String]>) -> String {
        let mut s = match labels {
            Some(l) => l.join(","),
            None => (0..self.n)
                .map(|i| format!("item{}", i + 1))
                .collect::<Vec<_>>()
                .join(","),
        };
        s.push('\n');
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| format!("{}", self.values[[i, j]]))
                .collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Symmetrize the product `C C^T` (exact for ordinal data; guards against
/// rounding asymmetry from blocked multiplication on cardinal data).
fn gram(c: &ComparisonMatrix) -> Array2<f64> {
    let mut g = c.entries().dot(&c.entries().t());
    for i in 0..c.n() {
        for j in (i + 1)..c.n() {
            let v = g[[i, j]];
            g[[j, i]] = v;
        }
    }
    g
}

/// Match-count similarity `(n + C C^T) / 2`. Missing comparisons enter as
/// zeros, so each unmatched reference item contributes exactly 1/2.
pub fn sim_match(c: &ComparisonMatrix) -> SimilarityMatrix {
    let n = c.n() as f64;
    let values = gram(c).mapv(|g| (n + g) / 2.0);
    SimilarityMatrix { n: c.n(), values }
}

/// Debiased match similarity for data observed through the random-flip model
/// (each pair kept with probability `q`, kept pairs correct with probability
/// `p`): `C~ C~^T / (q^2 (2p-1)^2) + n`. Off the diagonal this is an unbiased
/// estimator of twice the noiseless [`sim_match`]; entries may be negative
/// under heavy noise.
pub fn sim_match_debiased(c: &ComparisonMatrix, q: f64, p: f64) -> Result<SimilarityMatrix> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "sampling probability must lie in (0, 1]",
        });
    }
    if !p.is_finite() || p > 1.0 {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "correct-observation probability must lie in (1/2, 1]",
        });
    }
    if p <= 0.5 {
        return Err(Error::DegenerateNoise {
            q,
            p,
            reason: "flip probability 1/2 or more destroys the comparison signal",
        });
    }
    let n = c.n() as f64;
    let denom = q * q * (2.0 * p - 1.0) * (2.0 * p - 1.0);
    let values = gram(c).mapv(|g| g / denom + n);
    Ok(SimilarityMatrix { n: c.n(), values })
}

/// Similarity for repeated comparisons: commonly compared reference items
/// contribute `1 - |Q[i][k] - Q[j][k]|` (agreement of empirical win
/// fractions), everything else contributes 1/2.
pub fn sim_glm(mc: &MultiComparison) -> SimilarityMatrix {
    let n = mc.n();
    let q = mc.win_fraction();
    let counts = mc.counts();
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for k in 0..n {
                if counts[[i, k]] > 0 && counts[[j, k]] > 0 {
                    s += 1.0 - (q[[i, k]] - q[[j, k]]).abs();
                } else {
                    s += 0.5;
                }
            }
            values[[i, j]] = s;
            values[[j, i]] = s;
        }
    }
    SimilarityMatrix { n, values }
}

/// Cardinal similarity `1 - |C[i][j]|`: decisive comparisons mean far-apart
/// items. Missing pairs enter as zeros and so read as maximally similar.
pub fn sim_cardinal(c: &ComparisonMatrix) -> SimilarityMatrix {
    let n = c.n();
    let values = Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            1.0
        } else {
            1.0 - c.entry(i, j).abs()
        }
    });
    SimilarityMatrix { n, values }
}

/// Entrywise power `s^alpha`, `alpha > 0`: boosts (alpha > 1) or flattens
/// (alpha < 1) the contrast of an existing similarity.
pub fn sim_contrast(s: &SimilarityMatrix, alpha: f64) -> Result<SimilarityMatrix> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "contrast exponent must be positive",
        });
    }
    let values = s.values.mapv(|v| v.powf(alpha));
    SimilarityMatrix::new_signed(values)
}

/// How a Robinson report was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RCheckMethod {
    /// O(n^2) monotonicity scan; strictness by the equal-exterior-rows
    /// interval criterion.
    Scan,
    /// Permutation enumeration (n <= 8).
    BruteForce,
}

/// Result of a Robinson structure check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RMatrixReport {
    pub is_r: bool,
    /// Only the identity and the full reversal reorder the matrix as
    /// Robinson. `false` whenever `is_r` is false.
    pub is_strict_r: bool,
    /// Violated monotonicity constraints as index quadruples
    /// `(i, j, k, l)` meaning `values[i][j] > values[k][l]` where `<=` was
    /// required.
    pub violations: Vec<(usize, usize, usize, usize)>,
    pub method: RCheckMethod,
}

fn robinson_violations(values: &Array2<f64>) -> Vec<(usize, usize, usize, usize)> {
    let n = values.nrows();
    let mut v = Vec::new();
    // Lower triangle: entries grow toward the diagonal moving right along a
    // row or up a column. The diagonal itself is excluded: the conditions
    // concern off-diagonal coefficients, the spectral step is invariant to
    // the diagonal, and including it would break the symmetry that makes the
    // reversal of a Robinson matrix Robinson.
    for i in 1..n {
        for j in 0..i {
            if j + 1 < i && values[[i, j]] > values[[i, j + 1]] + R_EQ_TOL {
                v.push((i, j, i, j + 1));
            }
            if i + 1 < n && values[[i + 1, j]] > values[[i, j]] + R_EQ_TOL {
                v.push((i + 1, j, i, j));
            }
        }
    }
    v
}

/// Strictness scan: a Robinson matrix fails strictness exactly when some
/// proper index interval `[r, s]` has rows `r..=s` pairwise equal on every
/// column outside `[r, s]` (such a block can be reversed in place). The full
/// interval is excluded: reversing it is the global reversal, which
/// strictness permits.
fn strict_by_scan(values: &Array2<f64>) -> bool {
    let n = values.nrows();
    if n <= 2 {
        return true;
    }
    // lo[t]/hi[t]: extreme columns where rows t and t+1 differ; sentinels
    // make identical rows impose no constraint.
    let mut lo = vec![n; n - 1];
    let mut hi = vec![0usize; n - 1];
    for t in 0..n - 1 {
        for k in 0..n {
            if (values[[t, k]] - values[[t + 1, k]]).abs() > R_EQ_TOL {
                if lo[t] == n {
                    lo[t] = k;
                }
                hi[t] = k;
            }
        }
    }
    for r in 0..n - 1 {
        let mut min_lo = n;
        let mut max_hi = 0usize;
        for s in (r + 1)..n {
            min_lo = min_lo.min(lo[s - 1]);
            max_hi = max_hi.max(hi[s - 1]);
            if r == 0 && s == n - 1 {
                continue;
            }
            if min_lo >= r && max_hi <= s {
                return false;
            }
        }
    }
    true
}

/// Robinson check by scan. Always applicable; strictness uses the interval
/// criterion.
pub fn check_r(s: &SimilarityMatrix) -> RMatrixReport {
    let violations = robinson_violations(&s.values);
    let is_r = violations.is_empty();
    RMatrixReport {
        is_r,
        is_strict_r: is_r && strict_by_scan(&s.values),
        violations,
        method: RCheckMethod::Scan,
    }
}

const BRUTE_FORCE_MAX: usize = 8;

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    // Heap's algorithm, iterative form.
    let mut c = vec![0usize; n];
    all.push(cur.clone());
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                cur.swap(0, i);
            } else {
                cur.swap(c[i], i);
            }
            all.push(cur.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    all
}

fn is_r_under(values: &Array2<f64>, perm: &[usize]) -> bool {
    let n = values.nrows();
    for i in 1..n {
        for j in 0..i {
            let v = values[[perm[i], perm[j]]];
            if j + 1 < i && v > values[[perm[i], perm[j + 1]]] + R_EQ_TOL {
                return false;
            }
            if i + 1 < n && values[[perm[i + 1], perm[j]]] > v + R_EQ_TOL {
                return false;
            }
        }
    }
    true
}

/// Robinson check by permutation enumeration: strict exactly when the
/// identity and the reversal are the only orders under which the matrix is
/// Robinson. Factorial, so capped at n = 8.
pub fn check_r_brute(s: &SimilarityMatrix) -> Result<RMatrixReport> {
    if s.n > BRUTE_FORCE_MAX {
        return Err(Error::BruteForceTooLarge {
            n: s.n,
            max: BRUTE_FORCE_MAX,
        });
    }
    let violations = robinson_violations(&s.values);
    let is_r = violations.is_empty();
    let mut robinson_orders = 0usize;
    if is_r {
        for perm in permutations(s.n) {
            if is_r_under(&s.values, &perm) {
                robinson_orders += 1;
            }
        }
    }
    Ok(RMatrixReport {
        is_r,
        is_strict_r: is_r && robinson_orders == 2,
        violations,
        method: RCheckMethod::BruteForce,
    })
}
