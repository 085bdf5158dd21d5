//! Spectral seriation: Laplacians, Fiedler vectors, and the ranking
//! algorithm built on them.
//!
//! The pipeline turns a comparison matrix into a similarity matrix, forms a
//! graph Laplacian, extracts the eigenvector for the smallest nonzero
//! eigenvalue (the Fiedler vector), and sorts items by its entries. For
//! error-free comparisons the similarity is a strict R-matrix and the sorted
//! order is exactly the underlying ranking; under noise the order minimizing
//! upsets against the observed comparisons is returned.

mod eigen;

use ndarray::{Array1, Array2, Axis};

use crate::compdata::{ComparisonMatrix, MultiComparison};
use crate::error::{Error, Result};
use crate::similarity::{sim_cardinal, sim_contrast, sim_glm, sim_match, SimilarityMatrix};

pub use eigen::RESIDUAL_TOL;

/// Entries of the Fiedler vector closer than this are treated as repeated.
pub const FIEDLER_REPEAT_TOL: f64 = 1e-12;
/// Relative eigenvalue gap below which the Fiedler value is flagged as
/// near-degenerate.
pub const FIEDLER_GAP_TOL: f64 = 1e-8;

/// Which graph Laplacian to build from a similarity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    /// `diag(S 1) - S`.
    Unnormalized,
    /// `I - D^{-1} S`; eigensolves use the similar symmetric form
    /// `I - D^{-1/2} S D^{-1/2}` internally.
    Normalized,
}

impl std::fmt::Display for LaplacianKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LaplacianKind::Unnormalized => f.write_str("unnormalized"),
            LaplacianKind::Normalized => f.write_str("normalized"),
        }
    }
}

/// Which similarity construction feeds the spectral step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityKind {
    /// Matching-comparison count similarity.
    Match,
    /// Win-fraction agreement similarity (binary data reduces to one
    /// comparison per pair).
    Glm,
    /// `1 - |C|`, for cardinal comparisons whose magnitude carries meaning.
    Cardinal,
}

impl std::fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimilarityKind::Match => f.write_str("match"),
            SimilarityKind::Glm => f.write_str("glm"),
            SimilarityKind::Cardinal => f.write_str("cardinal"),
        }
    }
}

/// Direction in which the sorted Fiedler vector was read off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Increasing,
    Decreasing,
}

impl std::fmt::Display for Orientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Orientation::Increasing => f.write_str("increasing"),
            Orientation::Decreasing => f.write_str("decreasing"),
        }
    }
}

/// Options for [`serialrank`].
#[derive(Debug, Clone, Copy)]
pub struct SerialRankOptions {
    pub similarity: SimilarityKind,
    pub laplacian: LaplacianKind,
    /// Optional entrywise power applied to the similarity before the
    /// spectral step.
    pub contrast_alpha: Option<f64>,
}

impl Default for SerialRankOptions {
    fn default() -> Self {
        Self {
            similarity: SimilarityKind::Match,
            laplacian: LaplacianKind::Unnormalized,
            contrast_alpha: None,
        }
    }
}

/// A full ranking of `n` items: `ranks()[i]` is item `i`'s rank, 1 = best.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    ranks: Vec<usize>,
    orientation: Orientation,
    upsets: usize,
}

impl Ranking {
    /// Rank of each item, a bijection onto `1..=n` with 1 the best.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Items from best to worst: `order()[r]` holds rank `r + 1`.
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.ranks.len()];
        for (item, &rank) in self.ranks.iter().enumerate() {
            order[rank - 1] = item;
        }
        order
    }

    /// Sort direction of the Fiedler vector that produced this ranking.
    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Observed non-draw comparisons that disagree with the ranking.
    pub fn upsets(&self) -> usize {
        self.upsets
    }
}

/// Spectral summary attached to a Fiedler-vector computation.
#[derive(Debug, Clone)]
pub struct SpectralDiagnostics {
    pub laplacian_kind: LaplacianKind,
    /// Smallest eigenvalues, ascending; three of them (two when n = 2).
    pub eigenvalues: Vec<f64>,
    /// Unit-norm Fiedler vector, sign-canonicalized so its first entry of
    /// magnitude above [`FIEDLER_REPEAT_TOL`] is positive.
    pub fiedler: Array1<f64>,
    /// Whether the gap between the second and third eigenvalue is above
    /// tolerance, i.e. the Fiedler value is numerically simple.
    pub fiedler_simple: bool,
    /// Whether any two Fiedler entries coincide within tolerance; sorting is
    /// then stabilized by item index but the seriation order is ambiguous.
    pub repeated_entries: bool,
}

/// Result of [`hierarchical_refine`].
#[derive(Debug, Clone)]
pub struct RefinedRanking {
    pub ranking: Ranking,
    /// True when the top-k submatrix was disconnected and the base order was
    /// kept for the subset.
    pub fallback: bool,
}

/// Builds the similarity matrix a [`serialrank`] run would use.
pub fn build_similarity(c: &ComparisonMatrix, opts: &SerialRankOptions) -> Result<SimilarityMatrix> {
    let base = match opts.similarity {
        SimilarityKind::Match => sim_match(c),
        SimilarityKind::Glm => sim_glm(&MultiComparison::from(c)),
        SimilarityKind::Cardinal => sim_cardinal(c),
    };
    match opts.contrast_alpha {
        Some(alpha) => sim_contrast(&base, alpha),
        None => Ok(base),
    }
}

/// Graph Laplacian of a similarity matrix.
///
/// Degrees are full row sums, diagonal included. The normalized kind
/// requires every degree to be strictly positive and returns the
/// (nonsymmetric) `I - D^{-1} S`.
pub fn laplacian(s: &SimilarityMatrix, kind: LaplacianKind) -> Result<Array2<f64>> {
    let n = s.n();
    let values = s.values();
    let degrees = values.sum_axis(Axis(1));
    match kind {
        LaplacianKind::Unnormalized => {
            let mut l = -values.clone();
            for i in 0..n {
                l[[i, i]] += degrees[i];
            }
            Ok(l)
        }
        LaplacianKind::Normalized => {
            check_degrees(&degrees)?;
            let mut l = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    let x = -values[[i, j]] / degrees[i];
                    l[[i, j]] = if i == j { 1.0 + x } else { x };
                }
            }
            Ok(l)
        }
    }
}

fn check_degrees(degrees: &Array1<f64>) -> Result<()> {
    for (i, &d) in degrees.iter().enumerate() {
        if d <= 0.0 {
            return Err(Error::DegenerateDegree { item: i, degree: d });
        }
    }
    Ok(())
}

/// Connected components of the positive-similarity support, each sorted,
/// listed by smallest member.
fn positive_components(s: &SimilarityMatrix) -> Vec<Vec<usize>> {
    let n = s.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if s.value(i, j) > 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Flips the sign so the first entry of magnitude above tolerance is
/// positive.
fn canonicalize_sign(v: &mut Array1<f64>) {
    for &x in v.iter() {
        if x.abs() > FIEDLER_REPEAT_TOL {
            if x < 0.0 {
                v.mapv_inplace(|y| -y);
            }
            return;
        }
    }
}

/// Computes the Fiedler vector (eigenvector of the smallest nonzero
/// Laplacian eigenvalue) of a connected similarity graph.
///
/// Eigensolves run to a residual of [`RESIDUAL_TOL`] scaled by the
/// Laplacian's Frobenius norm. A near-degenerate gap between the second and
/// third eigenvalue is flagged, not errored.
pub fn fiedler_vector(s: &SimilarityMatrix, kind: LaplacianKind) -> Result<SpectralDiagnostics> {
    let n = s.n();
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    let components = positive_components(s);
    if components.len() > 1 {
        return Err(Error::Disconnected { components });
    }

    let values = s.values();
    let degrees = values.sum_axis(Axis(1));
    let (pairs, mut fiedler) = match kind {
        LaplacianKind::Unnormalized => {
            let l = laplacian(s, kind)?;
            let kernel = Array1::from_elem(n, 1.0 / (n as f64).sqrt());
            let pairs = eigen::smallest_eigenpairs(&l, 3, Some(&kernel))?;
            let fiedler = pairs.vectors[1].clone();
            (pairs, fiedler)
        }
        LaplacianKind::Normalized => {
            check_degrees(&degrees)?;
            // Solve the similar symmetric form and map the eigenvector back
            // through D^{-1/2}; eigenvalues transfer unchanged.
            let inv_sqrt = degrees.mapv(f64::sqrt).mapv(f64::recip);
            let mut l_sym = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..=i {
                    let x = -values[[i, j]] * inv_sqrt[i] * inv_sqrt[j];
                    let entry = if i == j { 1.0 + x } else { x };
                    l_sym[[i, j]] = entry;
                    l_sym[[j, i]] = entry;
                }
            }
            let mut kernel = degrees.mapv(f64::sqrt);
            let norm = kernel.dot(&kernel).sqrt();
            kernel /= norm;
            let pairs = eigen::smallest_eigenpairs(&l_sym, 3, Some(&kernel))?;
            let mut fiedler = &pairs.vectors[1] * &inv_sqrt;
            let norm = fiedler.dot(&fiedler).sqrt();
            fiedler /= norm;
            (pairs, fiedler)
        }
    };
    canonicalize_sign(&mut fiedler);

    let eigenvalues = pairs.values;
    let fiedler_simple = if eigenvalues.len() < 3 {
        true
    } else {
        let gap = eigenvalues[2] - eigenvalues[1];
        gap > FIEDLER_GAP_TOL * eigenvalues[2].abs().max(1.0)
    };
    let mut sorted: Vec<f64> = fiedler.to_vec();
    sorted.sort_by(f64::total_cmp);
    let repeated_entries = sorted
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() <= FIEDLER_REPEAT_TOL);

    Ok(SpectralDiagnostics {
        laplacian_kind: kind,
        eigenvalues,
        fiedler,
        fiedler_simple,
        repeated_entries,
    })
}

/// Counts observed non-draw comparisons that disagree with `ranks`
/// (rank 1 = best; each unordered pair counted once).
pub fn count_upsets(ranks: &[usize], c: &ComparisonMatrix) -> usize {
    let mut upsets = 0;
    for (i, j) in c.observed_pairs() {
        let e = c.entry(i, j);
        if (e > 0.0 && ranks[i] > ranks[j]) || (e < 0.0 && ranks[i] < ranks[j]) {
            upsets += 1;
        }
    }
    upsets
}

fn ranks_from_order(order: &[usize]) -> Vec<usize> {
    let mut ranks = vec![0; order.len()];
    for (pos, &item) in order.iter().enumerate() {
        ranks[item] = pos + 1;
    }
    ranks
}

/// Ranks items by sorting the Fiedler vector, reading it in the direction
/// that minimizes upsets against the comparisons (ties in entries broken by
/// item index; an upset tie between directions resolves to increasing).
pub fn ranking_from_fiedler(fiedler: &Array1<f64>, c: &ComparisonMatrix) -> Result<Ranking> {
    let n = c.n();
    if fiedler.len() != n {
        return Err(Error::DimensionMismatch {
            context: "fiedler vector vs comparison matrix",
            expected: n,
            got: fiedler.len(),
        });
    }
    let mut increasing: Vec<usize> = (0..n).collect();
    increasing.sort_by(|&a, &b| fiedler[a].total_cmp(&fiedler[b]).then(a.cmp(&b)));
    let mut decreasing: Vec<usize> = (0..n).collect();
    decreasing.sort_by(|&a, &b| fiedler[b].total_cmp(&fiedler[a]).then(a.cmp(&b)));

    let ranks_inc = ranks_from_order(&increasing);
    let ranks_dec = ranks_from_order(&decreasing);
    let upsets_inc = count_upsets(&ranks_inc, c);
    let upsets_dec = count_upsets(&ranks_dec, c);
    if upsets_inc <= upsets_dec {
        Ok(Ranking {
            ranks: ranks_inc,
            orientation: Orientation::Increasing,
            upsets: upsets_inc,
        })
    } else {
        Ok(Ranking {
            ranks: ranks_dec,
            orientation: Orientation::Decreasing,
            upsets: upsets_dec,
        })
    }
}

/// Runs the full spectral ranking pipeline on a comparison matrix.
pub fn serialrank(c: &ComparisonMatrix, opts: &SerialRankOptions) -> Result<Ranking> {
    let s = build_similarity(c, opts)?;
    let diag = fiedler_vector(&s, opts.laplacian)?;
    ranking_from_fiedler(&diag.fiedler, c)
}

/// Re-ranks the top `k` items of `base` by running the pipeline on their
/// comparison submatrix, leaving the rest of the order unchanged.
///
/// If the submatrix's similarity graph is disconnected the base order is
/// kept for the subset and `fallback` is set. Upsets are recounted against
/// the full matrix.
pub fn hierarchical_refine(
    c: &ComparisonMatrix,
    base: &Ranking,
    k: usize,
    opts: &SerialRankOptions,
) -> Result<RefinedRanking> {
    let n = c.n();
    if base.ranks.len() != n {
        return Err(Error::DimensionMismatch {
            context: "base ranking vs comparison matrix",
            expected: n,
            got: base.ranks.len(),
        });
    }
    if k < 2 || k > n {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k as f64,
            reason: "top size must lie in 2..=n",
        });
    }
    let order = base.order();
    let top = &order[..k];
    let sub = c.restrict(top)?;
    let (refined_top, fallback) = match serialrank(&sub, opts) {
        Ok(sub_ranking) => {
            let sub_order = sub_ranking.order();
            (sub_order.iter().map(|&r| top[r]).collect::<Vec<_>>(), false)
        }
        Err(Error::Disconnected { .. }) => (top.to_vec(), true),
        Err(e) => return Err(e),
    };
    let mut full_order = refined_top;
    full_order.extend_from_slice(&order[k..]);
    let ranks = ranks_from_order(&full_order);
    let upsets = count_upsets(&ranks, c);
    Ok(RefinedRanking {
        ranking: Ranking {
            ranks,
            orientation: base.orientation,
            upsets,
        },
        fallback,
    })
}

/// Closed-form continuum approximation of the Fiedler vector of the
/// error-free match similarity, sampled at `x = (i - 1/2) / n` and
/// unit-normalized.
///
/// `lambda` is the limiting eigenvalue scaled by `n^2`; the form is valid
/// for `lambda < 1/2`. With `a = 1/2 - lambda`, the sample at `x` is
/// `(1/(g1 - x) + 1/(g2 - x)) / (g1 - g2)^2
///  - 2 (ln(x - g1) - ln(g2 - x)) / (g1 - g2)^3`
/// where `g1 < g2` are the roots of `a + x - x^2`; the integration constant
/// vanishes because the function must be odd about `x = 1/2`.
pub fn asymptotic_fiedler(n: usize, lambda: f64) -> Result<Array1<f64>> {
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    if !lambda.is_finite() || lambda >= 0.5 {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "the continuum form requires lambda < 1/2",
        });
    }
    let alpha = 0.5 - lambda;
    let root = (1.0 + 4.0 * alpha).sqrt();
    let g1 = (1.0 - root) / 2.0;
    let g2 = (1.0 + root) / 2.0;
    let d2 = root * root;
    let d3 = -root * root * root; // (g1 - g2)^3
    let nf = n as f64;
    let mut v = Array1::from_shape_fn(n, |i| {
        let x = (i as f64 + 0.5) / nf;
        (1.0 / (g1 - x) + 1.0 / (g2 - x)) / d2 - 2.0 * ((x - g1).ln() - (g2 - x).ln()) / d3
    });
    let norm = v.dot(&v).sqrt();
    v /= norm;
    canonicalize_sign(&mut v);
    Ok(v)
}
