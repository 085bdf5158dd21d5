//! Agreement and error metrics: Kendall tau, top-k upset fractions, maximum
//! rank displacement, and eigenvector perturbation error.
//!
//! Rankings enter as rank vectors (`ranks[item] = rank`, 1 is best) holding a
//! permutation of `1..=n`; every ranker in this crate tie-breaks by item
//! index before reaching these functions.

use std::collections::BTreeMap;

use ndarray::Array1;

use crate::compdata::ComparisonMatrix;
use crate::error::{Error, Result};

/// How far from unit length an eigenvector may be before
/// [`fiedler_l2_error`] rejects it.
pub const UNIT_NORM_TOL: f64 = 1e-6;

/// Kendall rank correlation: concordant minus discordant pairs over all
/// `n(n-1)/2` pairs, computed by merge-sort inversion counting.
pub fn kendall_tau(a: &[usize], b: &[usize]) -> Result<f64> {
    check_same_n(a, b)?;
    let n = a.len();
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&i| a[i]);
    let mut seq: Vec<usize> = order.iter().map(|&i| b[i]).collect();
    let mut buf = vec![0; n];
    let discordant = count_inversions(&mut seq, &mut buf) as f64;
    let total = (n * (n - 1) / 2) as f64;
    Ok((total - 2.0 * discordant) / total)
}

/// Disagreement rate between a ranking and the comparisons among its top-`k`
/// items.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopKUpsets {
    /// Fraction of counted pairs whose comparison contradicts the ranking.
    pub fraction: f64,
    /// Observed, non-draw pairs with both items ranked in the top `k`.
    pub pairs: usize,
}

impl TopKUpsets {
    /// True when no pair qualified and the zero fraction is vacuous.
    pub fn is_vacuous(&self) -> bool {
        self.pairs == 0
    }
}

/// Fraction of observed comparisons among the top-`k` ranked items that the
/// ranking gets backwards. Draws carry no order, so exact-zero comparisons
/// count in neither the numerator nor the denominator.
pub fn upsets_topk(ranks: &[usize], c: &ComparisonMatrix, k: usize) -> Result<TopKUpsets> {
    let n = c.n();
    if ranks.len() != n {
        return Err(Error::DimensionMismatch {
            context: "ranking vs comparison matrix",
            expected: n,
            got: ranks.len(),
        });
    }
    if k < 2 || k > n {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k as f64,
            reason: "must lie in [2, n]",
        });
    }
    let mut pairs = 0;
    let mut upsets = 0;
    for (i, j) in c.observed_pairs() {
        if ranks[i] > k || ranks[j] > k {
            continue;
        }
        let e = c.entry(i, j);
        if e == 0.0 {
            continue;
        }
        pairs += 1;
        if (e > 0.0 && ranks[i] > ranks[j]) || (e < 0.0 && ranks[i] < ranks[j]) {
            upsets += 1;
        }
    }
    let fraction = if pairs == 0 {
        0.0
    } else {
        upsets as f64 / pairs as f64
    };
    Ok(TopKUpsets { fraction, pairs })
}

/// Largest change in any single item's rank between two rankings.
pub fn linf_displacement(a: &[usize], b: &[usize]) -> Result<usize> {
    check_same_n(a, b)?;
    Ok(a.iter()
        .zip(b)
        .map(|(&ra, &rb)| ra.abs_diff(rb))
        .max()
        .unwrap_or(0))
}

/// Sign-invariant distance between two unit eigenvectors:
/// `min(||f - g||, ||f + g||)`.
pub fn fiedler_l2_error(f: &Array1<f64>, g: &Array1<f64>) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch {
            context: "eigenvector lengths",
            expected: f.len(),
            got: g.len(),
        });
    }
    for v in [f, g] {
        let norm = v.dot(v).sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnit { norm });
        }
    }
    let diff = (f - g).dot(&(f - g)).sqrt();
    let sum = (f + g).dot(&(f + g)).sqrt();
    Ok(diff.min(sum))
}

/// Bundle of every metric for one recovered ranking against the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub kendall_tau: f64,
    /// `k -> l_k` upset fraction for each requested cutoff.
    pub upsets_topk: BTreeMap<usize, f64>,
    pub linf_displacement: usize,
    pub exact_recovery: bool,
    pub fiedler_l2_error: Option<f64>,
}

/// Evaluate `ranks` against `truth` on the data `c`, with upset fractions at
/// each cutoff in `ks` and an optional clean/noisy Fiedler vector pair.
pub fn metric_report(
    ranks: &[usize],
    truth: &[usize],
    c: &ComparisonMatrix,
    ks: &[usize],
    fiedler_pair: Option<(&Array1<f64>, &Array1<f64>)>,
) -> Result<MetricReport> {
    let kendall = kendall_tau(ranks, truth)?;
    let linf = linf_displacement(ranks, truth)?;
    let mut upsets = BTreeMap::new();
    for &k in ks {
        upsets.insert(k, upsets_topk(ranks, c, k)?.fraction);
    }
    let fiedler_err = match fiedler_pair {
        Some((clean, noisy)) => Some(fiedler_l2_error(clean, noisy)?),
        None => None,
    };
    let exact = linf == 0;
    debug_assert_eq!(exact, kendall == 1.0);
    Ok(MetricReport {
        kendall_tau: kendall,
        upsets_topk: upsets,
        linf_displacement: linf,
        exact_recovery: exact,
        fiedler_l2_error: fiedler_err,
    })
}

fn check_same_n(a: &[usize], b: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "ranking lengths",
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

/// Merge-sort inversion count; `seq` is sorted in place.
fn count_inversions(seq: &mut [usize], buf: &mut [usize]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = seq.split_at_mut(mid);
    let mut inv = count_inversions(left, buf) + count_inversions(right, buf);
    let (mut i, mut j) = (0, 0);
    for slot in buf[..n].iter_mut() {
        if i < left.len() && (j >= right.len() || left[i] <= right[j]) {
            *slot = left[i];
            i += 1;
        } else {
            // right[j] jumps ahead of every remaining left element.
            inv += (left.len() - i) as u64;
            *slot = right[j];
            j += 1;
        }
    }
    seq.copy_from_slice(&buf[..n]);
    inv
}
