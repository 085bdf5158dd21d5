//! Pairwise comparison data: matrices, noise models, generative draws and
//! match-list ingestion.
//!
//! Conventions used across the crate:
//!
//! * `entries[[i, j]] = +1` means item `i` is preferred to item `j`; rank 1 is
//!   the best rank. Items are 0-indexed internally.
//! * The diagonal is fixed at `+1` and counts as observed.
//! * Off-diagonal entries are antisymmetric (`entries[[j, i]] = -entries[[i, j]]`)
//!   and live in `[-1, 1]`. Ordinal data restricts them to `{-1, 0, +1}`.
//! * A draw is an *observed* zero; a missing comparison is an *unobserved*
//!   zero. The `observed` mask is the only thing that tells them apart.
//!
//! Randomness always flows through ChaCha8 seeded from a caller-supplied
//! 64-bit seed, so every construction here is reproducible across platforms.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logistic link `1 / (1 + exp(-x))`, the win probability of a strength gap
/// `x` under the Bradley-Terry-Luce model.
pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// An n-by-n matrix of (possibly averaged) pairwise comparison outcomes with
/// an observation mask and optional item labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    n: usize,
    entries: Array2<f64>,
    observed: Array2<bool>,
    labels: Option<Vec<String>>,
}

impl ComparisonMatrix {
    /// Fully observed consistent tournament: `entries[[i, j]] = +1` for `i < j`,
    /// so item 0 beats everyone and the true ranking is the identity.
    pub fn full_consistent(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooSmall { n, min: 2 });
        }
        let entries =
            Array2::from_shape_fn((n, n), |(i, j)| if i <= j { 1.0 } else { -1.0 });
        let observed = Array2::from_elem((n, n), true);
        Ok(Self {
            n,
            entries,
            observed,
            labels: None,
        })
    }

    /// Build from raw parts, validating every structural invariant.
    pub fn from_entries(entries: Array2<f64>, observed: Array2<bool>) -> Result<Self> {
        let n = entries.nrows();
        if n < 2 {
            return Err(Error::TooSmall { n, min: 2 });
        }
        if entries.ncols() != n {
            return Err(Error::InvalidMatrix(format!(
                "entries not square: {} x {}",
                n,
                entries.ncols()
            )));
        }
        if observed.dim() != (n, n) {
            return Err(Error::InvalidMatrix(format!(
                "observed mask shape {:?} does not match entries {} x {}",
                observed.dim(),
                n,
                n
            )));
        }
        for i in 0..n {
            if entries[[i, i]] != 1.0 || !observed[[i, i]] {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry {i} must be observed and equal to 1"
                )));
            }
            for j in (i + 1)..n {
                let (a, b) = (entries[[i, j]], entries[[j, i]]);
                if !a.is_finite() || a.abs() > 1.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i}, {j}) = {a} outside [-1, 1]"
                    )));
                }
                if b != -a {
                    return Err(Error::InvalidMatrix(format!(
                        "entries ({i}, {j}) and ({j}, {i}) are not antisymmetric: {a} vs {b}"
                    )));
                }
                if observed[[i, j]] != observed[[j, i]] {
                    return Err(Error::InvalidMatrix(format!(
                        "observation mask not symmetric at ({i}, {j})"
                    )));
                }
                if !observed[[i, j]] && a != 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "unobserved pair ({i}, {j}) has nonzero entry {a}"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            entries,
            observed,
            labels: None,
        })
    }

    /// Attach item labels (one per item).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: "labels",
                expected: self.n,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn observed(&self) -> &Array2<bool> {
        &self.observed
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of item `i`, falling back to `item<i+1>` when unlabeled.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("item{}", i + 1),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[[i, j]]
    }

    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.observed[[i, j]]
    }

    /// True when every entry lies in `{-1, 0, +1}`.
    pub fn is_ordinal(&self) -> bool {
        self.entries.iter().all(|&v| v == -1.0 || v == 0.0 || v == 1.0)
    }

    /// Observed off-diagonal pairs `(i, j)` with `i < j`, in row-major order.
    pub fn observed_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.observed[[i, j]] {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::InvalidMatrix(format!(
                "({i}, {j}) is not an off-diagonal pair of an {n} x {n} matrix",
                n = self.n
            )));
        }
        Ok(())
    }

    /// Set (and mark observed) the outcome of the pair `(i, j)` from `i`'s
    /// perspective, keeping antisymmetry.
    pub fn set_comparison(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        self.check_pair(i, j)?;
        if !value.is_finite() || value.abs() > 1.0 {
            return Err(Error::InvalidParameter {
                name: "value",
                value,
                reason: "comparison outcomes live in [-1, 1]",
            });
        }
        self.entries[[i, j]] = value;
        self.entries[[j, i]] = -value;
        self.observed[[i, j]] = true;
        self.observed[[j, i]] = true;
        Ok(())
    }

    /// Flip the sign of the comparison on pair `(i, j)`.
    pub fn flip_comparison(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        self.entries[[i, j]] = -self.entries[[i, j]];
        self.entries[[j, i]] = -self.entries[[j, i]];
        Ok(())
    }

    /// Remove the pair `(i, j)`: zero entries, clear the mask.
    pub fn delete_comparison(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        self.entries[[i, j]] = 0.0;
        self.entries[[j, i]] = 0.0;
        self.observed[[i, j]] = false;
        self.observed[[j, i]] = false;
        Ok(())
    }

    /// Negate every off-diagonal comparison (reverses the encoded ranking).
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out.entries[[i, j]] = -out.entries[[i, j]];
                }
            }
        }
        out
    }

    /// Relabel items: item `i` of the result is item `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: "permutation",
                expected: self.n,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(Error::InvalidMatrix(format!(
                    "not a permutation of 0..{}: {perm:?}",
                    self.n
                )));
            }
            seen[p] = true;
        }
        self.restrict(perm)
    }

    /// Submatrix on the given items, in the given order.
    pub fn restrict(&self, items: &[usize]) -> Result<Self> {
        if items.len() < 2 {
            return Err(Error::TooSmall {
                n: items.len(),
                min: 2,
            });
        }
        for &i in items {
            if i >= self.n {
                return Err(Error::InvalidMatrix(format!(
                    "item index {i} out of range for n = {}",
                    self.n
                )));
            }
        }
        let k = items.len();
        let entries = Array2::from_shape_fn((k, k), |(a, b)| self.entries[[items[a], items[b]]]);
        let observed = Array2::from_shape_fn((k, k), |(a, b)| self.observed[[items[a], items[b]]]);
        let labels = self
            .labels
            .as_ref()
            .map(|l| items.iter().map(|&i| l[i].clone()).collect());
        Ok(Self {
            n: k,
            entries,
            observed,
            labels,
        })
    }

    /// Apply a noise model, returning the perturbed copy. Deterministic given
    /// `spec.seed`; antisymmetry, the unit diagonal and mask symmetry are
    /// preserved by construction.
    pub fn apply_noise(&self, spec: &NoiseSpec) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut out = self.clone();
        match spec.kind {
            NoiseKind::UniformCorrupt | NoiseKind::UniformDelete => {
                if !(0.0..=1.0).contains(&spec.q) || !spec.q.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "q",
                        value: spec.q,
                        reason: "corrupted/deleted fraction must lie in [0, 1]",
                    });
                }
                let mut pairs = self.observed_pairs();
                let k = (spec.q * pairs.len() as f64).round() as usize;
                // Partial Fisher-Yates: the first k slots are a uniform
                // sample without replacement.
                for t in 0..k {
                    let r = rng.gen_range(t..pairs.len());
                    pairs.swap(t, r);
                }
                for &(i, j) in &pairs[..k] {
                    match spec.kind {
                        NoiseKind::UniformCorrupt => out.flip_comparison(i, j)?,
                        _ => out.delete_comparison(i, j)?,
                    }
                }
            }
            NoiseKind::ErdosRenyi => {
                validate_erdos_params(spec.q, spec.p)?;
                for (i, j) in self.observed_pairs() {
                    // One keep-draw per pair, then one flip-draw only for
                    // kept pairs.
                    if rng.gen::<f64>() < spec.q {
                        if rng.gen::<f64>() < 1.0 - spec.p {
                            out.flip_comparison(i, j)?;
                        }
                    } else {
                        out.delete_comparison(i, j)?;
                    }
                }
            }
            NoiseKind::LocalRange => {
                // Regenerates a fully observed matrix around the identity
                // ranking: exact comparisons outside the window, uniform
                // cardinal draws inside it.
                let m = spec.m_range;
                for i in 0..self.n {
                    for j in (i + 1)..self.n {
                        let v = if j - i > m {
                            1.0
                        } else {
                            rng.gen_range(-1.0..=1.0)
                        };
                        out.entries[[i, j]] = v;
                        out.entries[[j, i]] = -v;
                        out.observed[[i, j]] = true;
                        out.observed[[j, i]] = true;
                    }
                }
            }
            NoiseKind::GlmBtl => {
                let skills = spec.skills.as_ref().ok_or(Error::InvalidParameter {
                    name: "skills",
                    value: f64::NAN,
                    reason: "glm-btl noise needs one skill per item",
                })?;
                if skills.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        context: "skills",
                        expected: self.n,
                        got: skills.len(),
                    });
                }
                for (i, j) in self.observed_pairs() {
                    let win = rng.gen::<f64>() < logistic(skills[i] - skills[j]);
                    let v = if win { 1.0 } else { -1.0 };
                    out.entries[[i, j]] = v;
                    out.entries[[j, i]] = -v;
                }
            }
        }
        Ok(out)
    }

    /// CSV dump: a header row of labels, then the antisymmetric body with
    /// `NA` marking unobserved pairs.
    pub fn to_csv(&self) -> String {
        let labels: Vec<String> = (0..self.n).map(|i| self.label(i)).collect();
        let mut s = labels.join(",");
        s.push('\n');
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    if self.observed[[i, j]] {
                        format!("{}", self.entries[[i, j]])
                    } else {
                        "NA".to_string()
                    }
                })
                .collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

fn validate_erdos_params(q: f64, p: f64) -> Result<()> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "sampling probability must lie in (0, 1]",
        });
    }
    if !(p > 0.5 && p <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "correct-observation probability must lie in (1/2, 1]",
        });
    }
    Ok(())
}

/// Noise model families for [`ComparisonMatrix::apply_noise`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// Flip the sign of `round(q * observed pairs)` pairs, sampled uniformly
    /// without replacement.
    UniformCorrupt,
    /// Delete `round(q * observed pairs)` pairs (entry zeroed, mask cleared).
    UniformDelete,
    /// Keep each observed pair independently with probability `q`; flip each
    /// kept pair with probability `1 - p`.
    ErdosRenyi,
    /// Rebuild all comparisons from the identity ranking, drawing
    /// `Uniform[-1, 1]` whenever `|i - j| <= m_range`.
    LocalRange,
    /// Redraw each observed pair once from `Bernoulli(logistic(skill_i - skill_j))`.
    GlmBtl,
}

/// Parameters of one noise application. Unused fields are ignored by kinds
/// that do not read them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Corrupted/deleted fraction for the uniform kinds; keep probability
    /// for `erdos-renyi`.
    #[serde(default = "one")]
    pub q: f64,
    /// Correct-observation probability for `erdos-renyi`.
    #[serde(default = "one")]
    pub p: f64,
    /// Window half-width for `local-range`.
    #[serde(default)]
    pub m_range: usize,
    /// Item strengths for `glm-btl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skills: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

impl NoiseSpec {
    pub fn uniform_corrupt(fraction: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::UniformCorrupt,
            q: fraction,
            p: 1.0,
            m_range: 0,
            skills: None,
            seed,
        }
    }

    pub fn uniform_delete(fraction: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::UniformDelete,
            q: fraction,
            p: 1.0,
            m_range: 0,
            skills: None,
            seed,
        }
    }

    pub fn erdos_renyi(q: f64, p: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::ErdosRenyi,
            q,
            p,
            m_range: 0,
            skills: None,
            seed,
        }
    }

    pub fn local_range(m_range: usize, seed: u64) -> Self {
        Self {
            kind: NoiseKind::LocalRange,
            q: 1.0,
            p: 1.0,
            m_range,
            skills: None,
            seed,
        }
    }

    pub fn glm_btl(skills: Vec<f64>, seed: u64) -> Self {
        Self {
            kind: NoiseKind::GlmBtl,
            q: 1.0,
            p: 1.0,
            m_range: 0,
            skills: Some(skills),
            seed,
        }
    }
}

/// Aggregated repeated comparisons: per-pair trial counts and empirical win
/// fractions. `win_fraction[[i, j]]` is the fraction of the `counts[[i, j]]`
/// trials won by `i`; pairs with zero counts carry the uninformative `1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiComparison {
    n: usize,
    counts: Array2<u32>,
    win_fraction: Array2<f64>,
}

impl MultiComparison {
    pub fn from_parts(counts: Array2<u32>, win_fraction: Array2<f64>) -> Result<Self> {
        let n = counts.nrows();
        if n < 2 {
            return Err(Error::TooSmall { n, min: 2 });
        }
        if counts.ncols() != n || win_fraction.dim() != (n, n) {
            return Err(Error::InvalidMatrix(
                "counts and win_fraction must be square with matching shape".into(),
            ));
        }
        for i in 0..n {
            if counts[[i, i]] != 0 {
                return Err(Error::InvalidMatrix(format!(
                    "item {i} compared with itself"
                )));
            }
            for j in 0..n {
                let w = win_fraction[[i, j]];
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidMatrix(format!(
                        "win fraction ({i}, {j}) = {w} outside [0, 1]"
                    )));
                }
                if j > i {
                    if counts[[i, j]] != counts[[j, i]] {
                        return Err(Error::InvalidMatrix(format!(
                            "counts not symmetric at ({i}, {j})"
                        )));
                    }
                    let sum = w + win_fraction[[j, i]];
                    if counts[[i, j]] > 0 && (sum - 1.0).abs() > 1e-12 {
                        return Err(Error::InvalidMatrix(format!(
                            "win fractions at ({i}, {j}) sum to {sum}, not 1"
                        )));
                    }
                    if counts[[i, j]] == 0 && (w != 0.5 || win_fraction[[j, i]] != 0.5) {
                        return Err(Error::InvalidMatrix(format!(
                            "uncompared pair ({i}, {j}) must carry win fraction 1/2"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            n,
            counts,
            win_fraction,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &Array2<u32> {
        &self.counts
    }

    pub fn win_fraction(&self) -> &Array2<f64> {
        &self.win_fraction
    }

    /// Number of distinct opponents item `i` was compared with.
    pub fn degree(&self, i: usize) -> usize {
        (0..self.n)
            .filter(|&j| j != i && self.counts[[i, j]] > 0)
            .count()
    }

    /// Total (possibly fractional) wins of `i` over `j`.
    pub fn wins(&self, i: usize, j: usize) -> f64 {
        self.counts[[i, j]] as f64 * self.win_fraction[[i, j]]
    }
}

impl From<&ComparisonMatrix> for MultiComparison {
    /// Each observed pair becomes a single comparison whose win fraction is
    /// the affine rescaling of the outcome from `[-1, 1]` to `[0, 1]`.
    fn from(c: &ComparisonMatrix) -> Self {
        let n = c.n();
        let mut counts = Array2::zeros((n, n));
        let mut win_fraction = Array2::from_elem((n, n), 0.5);
        for (i, j) in c.observed_pairs() {
            counts[[i, j]] = 1;
            counts[[j, i]] = 1;
            let w = (c.entry(i, j) + 1.0) / 2.0;
            win_fraction[[i, j]] = w;
            win_fraction[[j, i]] = 1.0 - w;
        }
        Self {
            n,
            counts,
            win_fraction,
        }
    }
}

/// Draw repeated Bradley-Terry comparisons: pair `(i, j)` is played
/// `counts[[i, j]]` times and `i` wins each game independently with
/// probability `logistic(skills[i] - skills[j])`.
pub fn generate_glm(skills: &[f64], counts: &Array2<u32>, seed: u64) -> Result<MultiComparison> {
    let n = skills.len();
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    if counts.dim() != (n, n) {
        return Err(Error::DimensionMismatch {
            context: "counts",
            expected: n,
            got: counts.nrows(),
        });
    }
    for i in 0..n {
        if counts[[i, i]] != 0 {
            return Err(Error::InvalidMatrix(format!(
                "item {i} compared with itself"
            )));
        }
        for j in (i + 1)..n {
            if counts[[i, j]] != counts[[j, i]] {
                return Err(Error::InvalidMatrix(format!(
                    "counts not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut win_fraction = Array2::from_elem((n, n), 0.5);
    for i in 0..n {
        for j in (i + 1)..n {
            let m = counts[[i, j]];
            if m == 0 {
                continue;
            }
            let p_win = logistic(skills[i] - skills[j]);
            let mut wins = 0u32;
            for _ in 0..m {
                if rng.gen::<f64>() < p_win {
                    wins += 1;
                }
            }
            win_fraction[[i, j]] = wins as f64 / m as f64;
            win_fraction[[j, i]] = (m - wins) as f64 / m as f64;
        }
    }
    MultiComparison::from_parts(counts.clone(), win_fraction)
}

/// Parse a match-list: UTF-8 lines `label_a,label_b,outcome` where `outcome`
/// in `[-1, 1]` is from `a`'s perspective. `#` starts a comment. Repeated
/// meetings of a pair are averaged; items are indexed by first appearance.
pub fn ingest_matchlist(text: &str) -> Result<ComparisonMatrix> {
    use std::collections::HashMap;

    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    // (sum of outcomes oriented low-index-first, match count) per pair.
    let mut sums: HashMap<(usize, usize), (f64, usize)> = HashMap::new();

    let intern = |name: &str, labels: &mut Vec<String>, index: &mut HashMap<String, usize>| {
        if let Some(&i) = index.get(name) {
            i
        } else {
            let i = labels.len();
            labels.push(name.to_string());
            index.insert(name.to_string(), i);
            i
        }
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected `label_a,label_b,outcome`, got {} fields", fields.len()),
            });
        }
        let a = fields[0].trim();
        let b = fields[1].trim();
        if a.is_empty() || b.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty label".into(),
            });
        }
        if a == b {
            return Err(Error::Parse {
                line,
                message: format!("item `{a}` compared with itself"),
            });
        }
        let outcome: f64 = fields[2].trim().parse().map_err(|e| Error::Parse {
            line,
            message: format!("bad outcome `{}`: {e}", fields[2].trim()),
        })?;
        if !outcome.is_finite() || outcome.abs() > 1.0 {
            return Err(Error::OutcomeRange {
                line,
                value: outcome,
            });
        }
        let ia = intern(a, &mut labels, &mut index);
        let ib = intern(b, &mut labels, &mut index);
        let (key, oriented) = if ia < ib {
            ((ia, ib), outcome)
        } else {
            ((ib, ia), -outcome)
        };
        let cell = sums.entry(key).or_insert((0.0, 0));
        cell.0 += oriented;
        cell.1 += 1;
    }

    let n = labels.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    let mut entries = Array2::zeros((n, n));
    let mut observed = Array2::from_elem((n, n), false);
    for i in 0..n {
        entries[[i, i]] = 1.0;
        observed[[i, i]] = true;
    }
    for (&(i, j), &(sum, count)) in &sums {
        let avg = sum / count as f64;
        entries[[i, j]] = avg;
        entries[[j, i]] = -avg;
        observed[[i, j]] = true;
        observed[[j, i]] = true;
    }
    ComparisonMatrix::from_entries(entries, observed)?.with_labels(labels)
}

/// [`ingest_matchlist`] on a file path.
pub fn ingest_matchlist_path(path: &std::path::Path) -> Result<ComparisonMatrix> {
    let text = std::fs::read_to_string(path)?;
    ingest_matchlist(&text)
}
