//! Reference rankers the benchmarks compare against: point score, Rank
//! Centrality, and a Bradley-Terry maximum-likelihood fit.
//!
//! All three produce a [`ScoreVector`]; higher scores mean better items, and
//! [`ScoreVector::ranks`] breaks ties by item index so every ranker yields a
//! deterministic permutation.

use ndarray::Array2;

use crate::compdata::{ComparisonMatrix, MultiComparison};
use crate::error::{Error, Result};

/// Scores closer than this count as tied for the iterative rankers, whose
/// fixed points are only resolved to their convergence tolerance. Point
/// scores are exact sums and use a zero tolerance instead.
pub const SCORE_TIE_TOL: f64 = 1e-8;

/// Scores produced by a ranker, one per item, higher is better.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    scores: Vec<f64>,
    ties: Vec<(usize, usize)>,
    regularized: bool,
}

impl ScoreVector {
    fn new(scores: Vec<f64>, tie_tol: f64, regularized: bool) -> Self {
        let n = scores.len();
        let mut ties = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if (scores[i] - scores[j]).abs() <= tie_tol {
                    ties.push((i, j));
                }
            }
        }
        Self {
            scores,
            ties,
            regularized,
        }
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Pairs `(i, j)` with `i < j` whose scores agree within the ranker's
    /// tie tolerance.
    pub fn ties(&self) -> &[(usize, usize)] {
        &self.ties
    }

    /// True when the ranker had to regularize degenerate data (teleportation
    /// damping for Rank Centrality, add-half smoothing for the BTL fit).
    pub fn regularized(&self) -> bool {
        self.regularized
    }

    /// Ranks with 1 for the highest score; ties broken by item index.
    pub fn ranks(&self) -> Vec<usize> {
        let n = self.scores.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        let mut ranks = vec![0; n];
        for (pos, &item) in order.iter().enumerate() {
            ranks[item] = pos + 1;
        }
        ranks
    }
}

/// Win-minus-loss totals: `scores[i]` sums the outcomes of every observed
/// comparison involving item `i` (the row sum of the comparison matrix with
/// the diagonal excluded).
pub fn point_score(c: &ComparisonMatrix) -> ScoreVector {
    let mut scores = vec![0.0; c.n()];
    for (i, j) in c.observed_pairs() {
        let e = c.entry(i, j);
        scores[i] += e;
        scores[j] -= e;
    }
    ScoreVector::new(scores, 0.0, false)
}

/// Knobs for [`rank_centrality`]. `damping = 0` reproduces the plain chain
/// and requires a connected comparison graph; positive damping mixes in
/// uniform teleportation, which keeps the stationary distribution unique on
/// any data.
#[derive(Debug, Clone, Copy)]
pub struct RankCentralityOptions {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RankCentralityOptions {
    fn default() -> Self {
        Self {
            damping: 0.0,
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

/// Stationary distribution of the comparison random walk: from item `i` the
/// chain moves to opponent `j` with probability proportional to the fraction
/// of their comparisons `j` won, scaled by the maximum comparison degree so
/// rows stay substochastic, with the remainder as a self-loop.
///
/// Ordinal data enters through `MultiComparison::from(&matrix)`. Scores are
/// the stationary probabilities and sum to 1.
pub fn rank_centrality(mc: &MultiComparison, opts: &RankCentralityOptions) -> Result<ScoreVector> {
    if !(0.0..1.0).contains(&opts.damping) {
        return Err(Error::InvalidParameter {
            name: "damping",
            value: opts.damping,
            reason: "must lie in [0, 1)",
        });
    }
    check_iteration(opts.tol, opts.max_iter)?;
    let n = mc.n();
    if opts.damping == 0.0 {
        let components = comparison_components(mc);
        if components.len() > 1 {
            return Err(Error::Disconnected { components });
        }
    }

    let d_max = (0..n).map(|i| mc.degree(i)).max().unwrap_or(0);
    let mut p = Array2::zeros((n, n));
    for i in 0..n {
        let mut leave = 0.0;
        if d_max > 0 {
            for j in 0..n {
                if j != i && mc.counts()[[i, j]] > 0 {
                    // Probability of stepping toward j grows with how often
                    // j beat i.
                    let q = mc.win_fraction()[[j, i]] / d_max as f64;
                    p[[i, j]] = q;
                    leave += q;
                }
            }
        }
        p[[i, i]] = 1.0 - leave;
    }

    // Power iteration on pi <- (1 - damping) * pi P + damping / n.
    let teleport = opts.damping / n as f64;
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iter {
        for x in next.iter_mut() {
            *x = teleport;
        }
        for i in 0..n {
            let w = (1.0 - opts.damping) * pi[i];
            for j in 0..n {
                next[j] += w * p[[i, j]];
            }
        }
        residual = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>();
        let total: f64 = next.iter().sum();
        for x in next.iter_mut() {
            *x /= total;
        }
        std::mem::swap(&mut pi, &mut next);
        if residual <= opts.tol {
            return Ok(ScoreVector::new(pi, SCORE_TIE_TOL, opts.damping > 0.0));
        }
    }
    Err(Error::Convergence {
        method: "rank centrality power iteration",
        iterations: opts.max_iter,
        residual,
    })
}

/// Knobs for [`btl_mle`].
#[derive(Debug, Clone, Copy)]
pub struct BtlOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BtlOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100_000,
        }
    }
}

/// Bradley-Terry maximum likelihood via the minorization-maximization fixed
/// point `nu_i <- W_i / sum_j n_ij / (nu_i + nu_j)`, renormalized to
/// `sum nu = n` each sweep. Scores are `ln nu`.
///
/// The fit is well posed only when the win digraph is strongly connected;
/// otherwise half a win per direction is added to every compared pair and
/// the result is flagged [`ScoreVector::regularized`]. A disconnected
/// comparison graph has no joint fit at all and is an error.
pub fn btl_mle(mc: &MultiComparison, opts: &BtlOptions) -> Result<ScoreVector> {
    check_iteration(opts.tol, opts.max_iter)?;
    let n = mc.n();

    let mut games = Array2::<f64>::zeros((n, n));
    let mut wins = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if j != i && mc.counts()[[i, j]] > 0 {
                games[[i, j]] = f64::from(mc.counts()[[i, j]]);
                wins[[i, j]] = mc.wins(i, j);
            }
        }
    }
    let regularized = !strongly_connected(&wins);
    if regularized {
        let components = comparison_components(mc);
        if components.len() > 1 {
            return Err(Error::Disconnected { components });
        }
        // Half a win per direction adds one game to each compared pair.
        for i in 0..n {
            for j in 0..n {
                if games[[i, j]] > 0.0 {
                    wins[[i, j]] += 0.5;
                    games[[i, j]] += 1.0;
                }
            }
        }
    }

    let win_totals: Vec<f64> = (0..n).map(|i| (0..n).map(|j| wins[[i, j]]).sum()).collect();
    let mut nu = vec![1.0; n];
    let mut ll = log_likelihood(&nu, &wins, &games);
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let mut next: Vec<f64> = (0..n)
            .map(|i| {
                let denom: f64 = (0..n)
                    .filter(|&j| games[[i, j]] > 0.0)
                    .map(|j| games[[i, j]] / (nu[i] + nu[j]))
                    .sum();
                win_totals[i] / denom
            })
            .collect();
        let total: f64 = next.iter().sum();
        let scale = n as f64 / total;
        for v in next.iter_mut() {
            *v *= scale;
        }
        change = nu
            .iter()
            .zip(&next)
            .map(|(old, new)| (new - old).abs() / old)
            .fold(0.0, f64::max);
        nu = next;
        let next_ll = log_likelihood(&nu, &wins, &games);
        // The MM construction guarantees ascent; allow only rounding slack.
        assert!(
            next_ll >= ll - 1e-9 * (1.0 + ll.abs()),
            "MM sweep decreased the log-likelihood: {ll} -> {next_ll}"
        );
        ll = next_ll;
        if change <= opts.tol {
            let scores = nu.iter().map(|v| v.ln()).collect();
            return Ok(ScoreVector::new(scores, SCORE_TIE_TOL, regularized));
        }
    }
    Err(Error::Convergence {
        method: "BTL minorization-maximization",
        iterations: opts.max_iter,
        residual: change,
    })
}

fn check_iteration(tol: f64, max_iter: usize) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "must be finite and positive",
        });
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter {
            name: "max_iter",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    Ok(())
}

/// Connected components of the undirected compared-at-least-once graph,
/// grouped under their smallest member and sorted.
fn comparison_components(mc: &MultiComparison) -> Vec<Vec<usize>> {
    let n = mc.n();
    let mut component = vec![usize::MAX; n];
    let mut groups = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut members = vec![start];
        component[start] = id;
        let mut queue = vec![start];
        while let Some(i) = queue.pop() {
            for (j, cj) in component.iter_mut().enumerate() {
                if *cj == usize::MAX && mc.counts()[[i, j]] > 0 {
                    *cj = id;
                    members.push(j);
                    queue.push(j);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    groups
}

/// True when every item can reach every other through directed win edges.
fn strongly_connected(wins: &Array2<f64>) -> bool {
    let n = wins.nrows();
    let reaches_all = |forward: bool| {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = vec![0];
        while let Some(i) = queue.pop() {
            for j in 0..n {
                let w = if forward { wins[[i, j]] } else { wins[[j, i]] };
                if !seen[j] && w > 0.0 {
                    seen[j] = true;
                    queue.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reaches_all(true) && reaches_all(false)
}

fn log_likelihood(nu: &[f64], wins: &Array2<f64>, games: &Array2<f64>) -> f64 {
    let n = nu.len();
    let mut ll = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            if games[[i, j]] > 0.0 {
                // games is symmetric and already holds the pair's total.
                ll += wins[[i, j]] * nu[i].ln() + wins[[j, i]] * nu[j].ln()
                    - games[[i, j]] * (nu[i] + nu[j]).ln();
            }
        }
    }
    ll
}
