//! Experiment configuration, Monte Carlo sweeps, perturbation probes, file
//! ranking, and result serialization for the `serialrank` binary.
//!
//! Every run is reproducible: the per-trial seed is a documented SplitMix64
//! hash of the base seed, the grid index, and the trial index, so trials can
//! execute concurrently (or be replayed in isolation) without changing any
//! result, and appending grid points never reshuffles existing trials. CSV is
//! the canonical artifact; the SVG chart is a convenience rendering of the
//! same numbers. Runtimes are kept out of the CSV so reruns are
//! byte-identical.

mod plot;

pub use plot::emit_plot;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{btl_mle, point_score, rank_centrality, BtlOptions, RankCentralityOptions};
use crate::compdata::{ingest_matchlist_path, ComparisonMatrix, MultiComparison, NoiseSpec};
use crate::error::{Error, Result};
use crate::metrics::{fiedler_l2_error, kendall_tau, linf_displacement, upsets_topk, TopKUpsets};
use crate::similarity::{check_r, sim_match_debiased};
use crate::spectral::{
    build_similarity, fiedler_vector, ranking_from_fiedler, serialrank, LaplacianKind,
    SerialRankOptions, SimilarityKind,
};

/// Rankers the harness can benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Serialrank,
    SerialrankNormalized,
    PointScore,
    RankCentrality,
    Btl,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Serialrank => "serialrank",
            Method::SerialrankNormalized => "serialrank-normalized",
            Method::PointScore => "point-score",
            Method::RankCentrality => "rank-centrality",
            Method::Btl => "btl",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Noise parameter a sweep (or the fixed secondary noise) varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    /// Fraction of observed comparisons whose sign is flipped.
    CorruptFraction,
    /// Fraction of observed comparisons deleted.
    MissingFraction,
    /// Window half-width `m`: exact comparisons outside the window, uniform
    /// cardinal draws inside it.
    LocalRange,
    /// Keep probability of the Erdos-Renyi observation model (flip
    /// correctness comes from the config's `erdos_p`).
    ErdosQ,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::CorruptFraction => "corrupt-fraction",
            SweepParameter::MissingFraction => "missing-fraction",
            SweepParameter::LocalRange => "local-range",
            SweepParameter::ErdosQ => "erdos-q",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The parameter grid a benchmark walks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
}

/// Secondary noise held constant across the whole sweep (for example 20%
/// corruption while the missing fraction varies). Applied after the swept
/// noise of each trial.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedNoise {
    pub parameter: SweepParameter,
    pub value: f64,
}

fn default_erdos_p() -> f64 {
    1.0
}

/// One benchmark run: ground truth size, trial count, methods, the swept
/// noise grid, and output location. JSON on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub fixed_noise: Option<FixedNoise>,
    /// Correct-observation probability used whenever a noise parameter is
    /// `erdos-q`.
    #[serde(default = "default_erdos_p")]
    pub erdos_p: f64,
    pub seed: u64,
    /// Directory receiving `summary.csv`, `trials.csv` and `sweep.svg`.
    pub output: PathBuf,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("n = {} is below 2", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("methods must not be empty".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::InvalidConfig(format!("duplicate method {m}")));
            }
        }
        if self.sweep.grid.is_empty() {
            return Err(Error::InvalidConfig("sweep grid must not be empty".into()));
        }
        for &v in &self.sweep.grid {
            self.check_noise_value(self.sweep.parameter, v)?;
        }
        if let Some(fx) = &self.fixed_noise {
            self.check_noise_value(fx.parameter, fx.value)?;
        }
        Ok(())
    }

    fn check_noise_value(&self, parameter: SweepParameter, value: f64) -> Result<()> {
        let bad = |why: &str| {
            Err(Error::InvalidConfig(format!(
                "{parameter} = {value}: {why}"
            )))
        };
        if !value.is_finite() {
            return bad("must be finite");
        }
        match parameter {
            SweepParameter::CorruptFraction | SweepParameter::MissingFraction => {
                if !(0.0..=1.0).contains(&value) {
                    return bad("fraction must lie in [0, 1]");
                }
            }
            SweepParameter::ErdosQ => {
                if !(value > 0.0 && value <= 1.0) {
                    return bad("keep probability must lie in (0, 1]");
                }
                if !(self.erdos_p > 0.5 && self.erdos_p <= 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "erdos_p = {}: must lie in (1/2, 1]",
                        self.erdos_p
                    )));
                }
            }
            SweepParameter::LocalRange => {
                if value.fract() != 0.0 || value < 1.0 || value > (self.n - 1) as f64 {
                    return bad("window must be an integer in [1, n - 1]");
                }
            }
        }
        Ok(())
    }
}

/// SplitMix64 finalizer, the mixing primitive of the seed schedule.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable per-trial seed: nested SplitMix64 over the base seed, the grid
/// index, and the trial index. Appending grid points or trials never changes
/// existing seeds.
pub fn derive_seed(base: u64, grid_index: usize, trial: usize) -> u64 {
    mix(mix(mix(base) ^ grid_index as u64) ^ trial as u64)
}

const SWEPT_NOISE_SALT: u64 = 0x01;
const FIXED_NOISE_SALT: u64 = 0x02;

/// Metrics of one successful method run within a trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    pub tau: f64,
    pub linf: usize,
    pub exact: bool,
}

/// One (method, grid point, trial) outcome; `None` metrics mark a miss (the
/// method failed on that draw, for example through disconnection).
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub method: Method,
    pub grid_index: usize,
    pub grid_value: f64,
    pub trial: usize,
    pub seed: u64,
    pub metrics: Option<TrialMetrics>,
    pub runtime_secs: f64,
}

/// Aggregate over the trials of one (method, grid point) cell. Means and the
/// standard deviation cover successful trials; the recovery rate counts all
/// trials (a miss is not a recovery). The standard deviation is the
/// population form, so a single trial reports 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub method: Method,
    pub grid_value: f64,
    pub trials: usize,
    pub misses: usize,
    pub mean_tau: f64,
    pub std_tau: f64,
    pub recovery_rate: f64,
    pub mean_runtime_secs: f64,
}

/// Everything a sweep produced: per-cell aggregates plus the raw per-trial
/// records backing them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub cells: Vec<SweepCell>,
    pub records: Vec<TrialRecord>,
}

fn fmt_or_empty(x: f64, precision: usize) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.precision$}")
    }
}

impl SweepResult {
    /// Canonical aggregate table, one row per (method, grid value).
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("method,grid_value,trials,misses,mean_tau,std_tau,recovery_rate\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.6}\n",
                c.method,
                c.grid_value,
                c.trials,
                c.misses,
                fmt_or_empty(c.mean_tau, 6),
                fmt_or_empty(c.std_tau, 6),
                c.recovery_rate,
            ));
        }
        out
    }

    /// Per-trial table; each row can be replayed from its seed and grid
    /// value alone.
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("method,grid_value,trial,seed,tau,linf,exact_recovery,miss\n");
        for r in &self.records {
            let (tau, linf, exact) = match &r.metrics {
                Some(m) => (
                    format!("{:.12}", m.tau),
                    m.linf.to_string(),
                    m.exact.to_string(),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.method,
                r.grid_value,
                r.trial,
                r.seed,
                tau,
                linf,
                exact,
                r.metrics.is_none(),
            ));
        }
        out
    }
}

fn noise_spec(parameter: SweepParameter, value: f64, erdos_p: f64, seed: u64) -> NoiseSpec {
    match parameter {
        SweepParameter::CorruptFraction => NoiseSpec::uniform_corrupt(value, seed),
        SweepParameter::MissingFraction => NoiseSpec::uniform_delete(value, seed),
        SweepParameter::LocalRange => NoiseSpec::local_range(value as usize, seed),
        SweepParameter::ErdosQ => NoiseSpec::erdos_renyi(value, erdos_p, seed),
    }
}

/// Rebuild the noisy data of one trial from its recorded seed and swept
/// value, independent of where the trial sat in the grid.
fn trial_data(cfg: &ExperimentConfig, grid_value: f64, seed: u64) -> Result<ComparisonMatrix> {
    let clean = ComparisonMatrix::full_consistent(cfg.n)?;
    let mut data = clean.apply_noise(&noise_spec(
        cfg.sweep.parameter,
        grid_value,
        cfg.erdos_p,
        mix(seed ^ SWEPT_NOISE_SALT),
    ))?;
    if let Some(fx) = &cfg.fixed_noise {
        data = data.apply_noise(&noise_spec(
            fx.parameter,
            fx.value,
            cfg.erdos_p,
            mix(seed ^ FIXED_NOISE_SALT),
        ))?;
    }
    Ok(data)
}

/// Run one method on prepared data, reducing every ranker to a rank vector.
/// Rank Centrality starts undamped and retries with light teleportation when
/// the comparison graph is disconnected.
fn run_method(method: Method, data: &ComparisonMatrix) -> Result<Vec<usize>> {
    match method {
        Method::Serialrank => {
            serialrank(data, &SerialRankOptions::default()).map(|r| r.ranks().to_vec())
        }
        Method::SerialrankNormalized => {
            let opts = SerialRankOptions {
                laplacian: LaplacianKind::Normalized,
                ..SerialRankOptions::default()
            };
            serialrank(data, &opts).map(|r| r.ranks().to_vec())
        }
        Method::PointScore => Ok(point_score(data).ranks()),
        Method::RankCentrality => {
            let mc = MultiComparison::from(data);
            match rank_centrality(&mc, &RankCentralityOptions::default()) {
                Err(Error::Disconnected { .. }) => {
                    let damped = RankCentralityOptions {
                        damping: 0.01,
                        ..Default::default()
                    };
                    rank_centrality(&mc, &damped).map(|s| s.ranks())
                }
                other => other.map(|s| s.ranks()),
            }
        }
        Method::Btl => btl_mle(&MultiComparison::from(data), &BtlOptions::default())
            .map(|s| s.ranks()),
    }
}

fn run_trial(cfg: &ExperimentConfig, grid_index: usize, trial: usize) -> Result<Vec<TrialRecord>> {
    let seed = derive_seed(cfg.seed, grid_index, trial);
    let grid_value = cfg.sweep.grid[grid_index];
    let data = trial_data(cfg, grid_value, seed)?;
    let truth: Vec<usize> = (1..=cfg.n).collect();
    let mut records = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let start = Instant::now();
        let ranks = run_method(method, &data);
        let runtime_secs = start.elapsed().as_secs_f64();
        let metrics = match ranks {
            Ok(ranks) => {
                let tau = kendall_tau(&ranks, &truth)?;
                let linf = linf_displacement(&ranks, &truth)?;
                Some(TrialMetrics {
                    tau,
                    linf,
                    exact: linf == 0,
                })
            }
            Err(_) => None,
        };
        records.push(TrialRecord {
            method,
            grid_index,
            grid_value,
            trial,
            seed,
            metrics,
            runtime_secs,
        });
    }
    Ok(records)
}

/// Execute every (grid point, trial) of the config, trials in parallel, and
/// aggregate per (method, grid point). Identical configs produce identical
/// results regardless of thread scheduling.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.sweep.grid.len())
        .flat_map(|gi| (0..cfg.trials).map(move |t| (gi, t)))
        .collect();
    let nested: Vec<Vec<TrialRecord>> = jobs
        .par_iter()
        .map(|&(gi, t)| run_trial(cfg, gi, t))
        .collect::<Result<_>>()?;
    let records: Vec<TrialRecord> = nested.into_iter().flatten().collect();

    let mut cells = Vec::with_capacity(cfg.methods.len() * cfg.sweep.grid.len());
    for &method in &cfg.methods {
        for (gi, &grid_value) in cfg.sweep.grid.iter().enumerate() {
            let slot: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.method == method && r.grid_index == gi)
                .collect();
            let taus: Vec<f64> = slot
                .iter()
                .filter_map(|r| r.metrics.as_ref().map(|m| m.tau))
                .collect();
            let misses = slot.len() - taus.len();
            let mean_tau = mean(&taus);
            let std_tau = if taus.is_empty() {
                f64::NAN
            } else {
                (taus.iter().map(|t| (t - mean_tau).powi(2)).sum::<f64>() / taus.len() as f64)
                    .sqrt()
            };
            let recovered = slot
                .iter()
                .filter(|r| r.metrics.as_ref().is_some_and(|m| m.exact))
                .count();
            let mean_runtime_secs =
                slot.iter().map(|r| r.runtime_secs).sum::<f64>() / slot.len() as f64;
            cells.push(SweepCell {
                method,
                grid_value,
                trials: slot.len(),
                misses,
                mean_tau,
                std_tau,
                recovery_rate: recovered as f64 / slot.len() as f64,
                mean_runtime_secs,
            });
        }
    }
    Ok(SweepResult {
        parameter: cfg.sweep.parameter,
        cells,
        records,
    })
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Run a sweep's file outputs: canonical CSVs plus the SVG chart, all under
/// the config's output directory. Returns (summary, trials, svg) paths.
pub fn write_sweep_outputs(
    cfg: &ExperimentConfig,
    result: &SweepResult,
) -> Result<(PathBuf, PathBuf, PathBuf)> {
    fs::create_dir_all(&cfg.output)?;
    let summary = cfg.output.join("summary.csv");
    let trials = cfg.output.join("trials.csv");
    let svg = cfg.output.join("sweep.svg");
    fs::write(&summary, result.summary_csv())?;
    fs::write(&trials, result.trials_csv())?;
    emit_plot(result, &svg)?;
    Ok((summary, trials, svg))
}

/// One grid row of a perturbation probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub q: f64,
    pub trials: usize,
    pub misses: usize,
    pub mean_fiedler_l2: f64,
    pub mean_linf: f64,
}

/// Eigenvector and ranking perturbation against observation sparsity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeTable {
    pub n: usize,
    pub p: f64,
    pub rows: Vec<ProbeRow>,
}

impl ProbeTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,trials,misses,mean_fiedler_l2,mean_linf\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.q,
                r.trials,
                r.misses,
                fmt_or_empty(r.mean_fiedler_l2, 9),
                fmt_or_empty(r.mean_linf, 6),
            ));
        }
        out
    }
}

/// Measure how observation sparsity `q` and flip noise `1 - p` perturb the
/// normalized-Laplacian Fiedler vector of the debiased match similarity, and
/// the ranking read from it. The clean reference runs the identical debiased
/// pipeline at `q = 1, p = 1`, so the zero-noise grid point is exactly zero.
pub fn run_perturbation_probe(
    n: usize,
    q_grid: &[f64],
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<ProbeTable> {
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if q_grid.is_empty() {
        return Err(Error::InvalidConfig("q grid must not be empty".into()));
    }
    for &q in q_grid {
        if !(q.is_finite() && q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                reason: "keep probability must lie in (0, 1]",
            });
        }
    }
    if !(p.is_finite() && p > 0.5 && p <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "correct-observation probability must lie in (1/2, 1]",
        });
    }

    let clean = ComparisonMatrix::full_consistent(n)?;
    let clean_sim = sim_match_debiased(&clean, 1.0, 1.0)?;
    let clean_fiedler = fiedler_vector(&clean_sim, LaplacianKind::Normalized)?.fiedler;
    let truth: Vec<usize> = (1..=n).collect();

    let jobs: Vec<(usize, usize)> = (0..q_grid.len())
        .flat_map(|qi| (0..trials).map(move |t| (qi, t)))
        .collect();
    let outcomes: Vec<Option<(f64, usize)>> = jobs
        .par_iter()
        .map(|&(qi, t)| {
            let q = q_grid[qi];
            let trial_seed = derive_seed(seed, qi, t);
            let run = || -> Result<(f64, usize)> {
                let noisy = clean.apply_noise(&NoiseSpec::erdos_renyi(
                    q,
                    p,
                    mix(trial_seed ^ SWEPT_NOISE_SALT),
                ))?;
                let sim = sim_match_debiased(&noisy, q, p)?;
                let diag = fiedler_vector(&sim, LaplacianKind::Normalized)?;
                let l2 = fiedler_l2_error(&clean_fiedler, &diag.fiedler)?;
                let ranking = ranking_from_fiedler(&diag.fiedler, &noisy)?;
                let linf = linf_displacement(ranking.ranks(), &truth)?;
                Ok((l2, linf))
            };
            run().ok()
        })
        .collect();

    let mut rows = Vec::with_capacity(q_grid.len());
    for (qi, &q) in q_grid.iter().enumerate() {
        let slot: Vec<&Option<(f64, usize)>> = jobs
            .iter()
            .zip(&outcomes)
            .filter(|((j, _), _)| *j == qi)
            .map(|(_, o)| o)
            .collect();
        let hits: Vec<(f64, usize)> = slot.iter().filter_map(|o| **o).collect();
        let l2s: Vec<f64> = hits.iter().map(|(l2, _)| *l2).collect();
        let linfs: Vec<f64> = hits.iter().map(|(_, l)| *l as f64).collect();
        rows.push(ProbeRow {
            q,
            trials: slot.len(),
            misses: slot.len() - hits.len(),
            mean_fiedler_l2: mean(&l2s),
            mean_linf: mean(&linfs),
        });
    }
    Ok(ProbeTable { n, p, rows })
}

/// Options for ranking a match-list file.
#[derive(Debug, Clone)]
pub struct RankFileOptions {
    pub method: Method,
    pub similarity: SimilarityKind,
    pub laplacian: LaplacianKind,
    pub contrast_alpha: Option<f64>,
    /// Extra upset-table cutoff merged into the standard k set.
    pub topk: Option<usize>,
    /// Directory receiving `ranking.csv` and `upsets.csv`.
    pub output: PathBuf,
}

impl Default for RankFileOptions {
    fn default() -> Self {
        Self {
            method: Method::Serialrank,
            similarity: SimilarityKind::Match,
            laplacian: LaplacianKind::Unnormalized,
            contrast_alpha: None,
            topk: None,
            output: PathBuf::from("."),
        }
    }
}

/// Result of ranking a file: per-item ranks and ranker values, the upset
/// table, and where the CSVs went.
#[derive(Debug, Clone)]
pub struct RankFileReport {
    pub labels: Vec<String>,
    pub ranks: Vec<usize>,
    /// Fiedler entry (spectral methods) or score (baselines), per item.
    pub values: Vec<f64>,
    pub upsets: Vec<(usize, TopKUpsets)>,
    pub ranking_path: PathBuf,
    pub upsets_path: PathBuf,
}

/// Swap item indices for labels in disconnection errors.
fn label_disconnection(err: Error, c: &ComparisonMatrix) -> Error {
    match err {
        Error::Disconnected { components } => Error::DisconnectedLabels {
            groups: components
                .iter()
                .map(|g| g.iter().map(|&i| c.label(i)).collect())
                .collect(),
        },
        other => other,
    }
}

/// Rank the items of a match-list file and write the ranking plus its
/// top-k upset table.
pub fn rank_file(input: &Path, opts: &RankFileOptions) -> Result<RankFileReport> {
    let c = ingest_matchlist_path(input)?;
    let n = c.n();
    let (ranks, values) = match opts.method {
        Method::Serialrank | Method::SerialrankNormalized => {
            let sopts = SerialRankOptions {
                similarity: opts.similarity,
                laplacian: if opts.method == Method::SerialrankNormalized {
                    LaplacianKind::Normalized
                } else {
                    opts.laplacian
                },
                contrast_alpha: opts.contrast_alpha,
            };
            let sim = build_similarity(&c, &sopts)?;
            let diag = fiedler_vector(&sim, sopts.laplacian)
                .map_err(|e| label_disconnection(e, &c))?;
            let ranking = ranking_from_fiedler(&diag.fiedler, &c)?;
            (ranking.ranks().to_vec(), diag.fiedler.to_vec())
        }
        Method::PointScore => {
            let sv = point_score(&c);
            (sv.ranks(), sv.scores().to_vec())
        }
        Method::RankCentrality => {
            let mc = MultiComparison::from(&c);
            let sv = match rank_centrality(&mc, &RankCentralityOptions::default()) {
                Err(Error::Disconnected { components }) => {
                    return Err(label_disconnection(
                        Error::Disconnected { components },
                        &c,
                    ));
                }
                other => other?,
            };
            (sv.ranks(), sv.scores().to_vec())
        }
        Method::Btl => {
            let sv = btl_mle(&MultiComparison::from(&c), &BtlOptions::default())
                .map_err(|e| label_disconnection(e, &c))?;
            (sv.ranks(), sv.scores().to_vec())
        }
    };

    let ks: BTreeSet<usize> = [10, 25, 50, 100, n]
        .into_iter()
        .chain(opts.topk)
        .filter(|&k| (2..=n).contains(&k))
        .collect();
    let mut upsets = Vec::with_capacity(ks.len());
    for &k in &ks {
        upsets.push((k, upsets_topk(&ranks, &c, k)?));
    }

    fs::create_dir_all(&opts.output)?;
    let ranking_path = opts.output.join("ranking.csv");
    let upsets_path = opts.output.join("upsets.csv");

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&i| ranks[i]);
    let mut ranking_csv = String::from("rank,label,value\n");
    for &item in &order {
        ranking_csv.push_str(&format!(
            "{},{},{}\n",
            ranks[item],
            c.label(item),
            values[item]
        ));
    }
    fs::write(&ranking_path, ranking_csv)?;

    let mut upsets_csv = String::from("k,upset_fraction,pairs,vacuous\n");
    for (k, u) in &upsets {
        upsets_csv.push_str(&format!(
            "{},{},{},{}\n",
            k,
            u.fraction,
            u.pairs,
            u.is_vacuous()
        ));
    }
    fs::write(&upsets_path, upsets_csv)?;

    let labels: Vec<String> = (0..n).map(|i| c.label(i)).collect();
    Ok(RankFileReport {
        labels,
        ranks,
        values,
        upsets,
        ranking_path,
        upsets_path,
    })
}

/// Serializable snapshot of one matrix's spectral pipeline, for the
/// `diagnose` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnosis {
    pub n: usize,
    pub similarity: String,
    pub laplacian: String,
    pub eigenvalues: Vec<f64>,
    pub fiedler: Vec<f64>,
    pub fiedler_simple: bool,
    pub repeated_fiedler_entries: bool,
    pub is_r: bool,
    pub is_strict_r: bool,
    pub ranks: Vec<usize>,
    pub orientation: String,
    pub upsets: usize,
}

/// Run the full pipeline on one matrix and report every intermediate worth
/// inspecting: similarity structure, leading spectrum, Fiedler vector,
/// ranking, and upsets.
pub fn diagnose(c: &ComparisonMatrix, opts: &SerialRankOptions) -> Result<Diagnosis> {
    let sim = build_similarity(c, opts)?;
    let report = check_r(&sim);
    let diag = fiedler_vector(&sim, opts.laplacian).map_err(|e| label_disconnection(e, c))?;
    let ranking = ranking_from_fiedler(&diag.fiedler, c)?;
    Ok(Diagnosis {
        n: c.n(),
        similarity: opts.similarity.to_string(),
        laplacian: opts.laplacian.to_string(),
        eigenvalues: diag.eigenvalues.clone(),
        fiedler: diag.fiedler.to_vec(),
        fiedler_simple: diag.fiedler_simple,
        repeated_fiedler_entries: diag.repeated_entries,
        is_r: report.is_r,
        is_strict_r: report.is_strict_r,
        ranks: ranking.ranks().to_vec(),
        orientation: ranking.orientation().to_string(),
        upsets: ranking.upsets(),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn base_config() -> ExperimentConfig {
        ExperimentConfig {
            n: 10,
            trials: 3,
            methods: vec![Method::Serialrank, Method::PointScore],
            sweep: SweepSpec {
                parameter: SweepParameter::CorruptFraction,
                grid: vec![0.0, 0.1],
            },
            fixed_noise: None,
            erdos_p: 1.0,
            seed: 7,
            output: PathBuf::from("unused"),
        }
    }

    #[test]
    fn config_json_round_trips() {
        let text = r#"{
            "n": 100,
            "trials": 50,
            "methods": ["serialrank", "serialrank-normalized", "point-score",
                        "rank-centrality", "btl"],
            "sweep": { "parameter": "corrupt-fraction", "grid": [0.0, 0.1, 0.2] },
            "fixed_noise": { "parameter": "missing-fraction", "value": 0.2 },
            "seed": 42,
            "output": "out/corrupt"
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.methods.len(), 5);
        assert_eq!(cfg.erdos_p, 1.0);
        let back = serde_json::to_string(&cfg).unwrap();
        let again: ExperimentConfig = serde_json::from_str(&back).unwrap();
        assert_eq!(again.sweep.grid, cfg.sweep.grid);
    }

    #[test]
    fn config_validation_rejects_the_usual_suspects() {
        let ok = base_config();
        assert!(ok.validate().is_ok());

        let mut cfg = base_config();
        cfg.trials = 0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));

        let mut cfg = base_config();
        cfg.methods.clear();
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));

        let mut cfg = base_config();
        cfg.methods = vec![Method::Btl, Method::Btl];
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));

        let mut cfg = base_config();
        cfg.sweep.grid.clear();
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));

        let mut cfg = base_config();
        cfg.sweep.grid = vec![1.5];
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));

        let mut cfg = base_config();
        cfg.sweep.parameter = SweepParameter::LocalRange;
        cfg.sweep.grid = vec![2.5];
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));

        let mut cfg = base_config();
        cfg.sweep.parameter = SweepParameter::ErdosQ;
        cfg.sweep.grid = vec![0.5];
        cfg.erdos_p = 0.5;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));

        let mut cfg = base_config();
        cfg.fixed_noise = Some(FixedNoise {
            parameter: SweepParameter::MissingFraction,
            value: -0.1,
        });
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));

        // Unknown fields are configuration typos, not silently ignored.
        assert!(serde_json::from_str::<ExperimentConfig>(
            r#"{"n": 5, "trials": 1, "methods": ["btl"], "typo": 1,
                "sweep": {"parameter": "erdos-q", "grid": [1.0]},
                "seed": 0, "output": "x"}"#
        )
        .is_err());
    }

    #[test]
    fn derived_seeds_are_distinct_and_stable() {
        let mut seen = HashSet::new();
        for gi in 0..20 {
            for t in 0..50 {
                assert!(seen.insert(derive_seed(99, gi, t)), "collision at ({gi}, {t})");
            }
        }
        // Same inputs, same seed; grid contents play no role.
        assert_eq!(derive_seed(99, 3, 7), derive_seed(99, 3, 7));
        assert_ne!(derive_seed(99, 3, 7), derive_seed(98, 3, 7));
    }

    #[test]
    fn noiseless_sweep_is_perfect_for_every_method() {
        let cfg = ExperimentConfig {
            n: 12,
            trials: 3,
            methods: vec![
                Method::Serialrank,
                Method::SerialrankNormalized,
                Method::PointScore,
                Method::RankCentrality,
                Method::Btl,
            ],
            sweep: SweepSpec {
                parameter: SweepParameter::CorruptFraction,
                grid: vec![0.0],
            },
            fixed_noise: None,
            erdos_p: 1.0,
            seed: 3,
            output: PathBuf::from("unused"),
        };
        let result = run_sweep(&cfg).unwrap();
        assert_eq!(result.cells.len(), 5);
        for cell in &result.cells {
            assert_eq!(cell.misses, 0, "{} missed", cell.method);
            assert_eq!(cell.mean_tau, 1.0, "{} mean tau", cell.method);
            assert_eq!(cell.std_tau, 0.0, "{} std tau", cell.method);
            assert_eq!(cell.recovery_rate, 1.0, "{} recovery", cell.method);
        }
    }

    #[test]
    fn sweeps_are_deterministic_and_replayable() {
        let cfg = ExperimentConfig {
            n: 10,
            trials: 4,
            methods: vec![Method::Serialrank, Method::PointScore],
            sweep: SweepSpec {
                parameter: SweepParameter::CorruptFraction,
                grid: vec![0.1, 0.3],
            },
            fixed_noise: Some(FixedNoise {
                parameter: SweepParameter::MissingFraction,
                value: 0.2,
            }),
            erdos_p: 1.0,
            seed: 11,
            output: PathBuf::from("unused"),
        };
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a.summary_csv(), b.summary_csv());
        assert_eq!(a.trials_csv(), b.trials_csv());
        assert_eq!(a.cells.len(), cfg.methods.len() * cfg.sweep.grid.len());
        assert_eq!(
            a.records.len(),
            cfg.methods.len() * cfg.sweep.grid.len() * cfg.trials
        );

        // Replay: every record's metrics reproduce from its seed and grid
        // value alone.
        let truth: Vec<usize> = (1..=cfg.n).collect();
        for record in &a.records {
            let data = trial_data(&cfg, record.grid_value, record.seed).unwrap();
            match run_method(record.method, &data) {
                Ok(ranks) => {
                    let m = record.metrics.as_ref().expect("recorded as miss");
                    assert_eq!(kendall_tau(&ranks, &truth).unwrap(), m.tau);
                    assert_eq!(linf_displacement(&ranks, &truth).unwrap(), m.linf);
                }
                Err(_) => assert!(record.metrics.is_none()),
            }
        }
    }

    #[test]
    fn fixed_noise_composes_with_the_swept_noise() {
        let cfg = ExperimentConfig {
            n: 20,
            trials: 1,
            methods: vec![Method::PointScore],
            sweep: SweepSpec {
                parameter: SweepParameter::MissingFraction,
                grid: vec![0.3],
            },
            fixed_noise: Some(FixedNoise {
                parameter: SweepParameter::CorruptFraction,
                value: 0.2,
            }),
            erdos_p: 1.0,
            seed: 5,
            output: PathBuf::from("unused"),
        };
        let data = trial_data(&cfg, 0.3, derive_seed(cfg.seed, 0, 0)).unwrap();
        let full = 20 * 19 / 2;
        let observed = data.observed_pairs().len();
        assert_eq!(observed, full - (0.3 * full as f64).round() as usize);
        let clean = ComparisonMatrix::full_consistent(20).unwrap();
        let flipped = data
            .observed_pairs()
            .iter()
            .filter(|&&(i, j)| data.entry(i, j) != clean.entry(i, j))
            .count();
        assert_eq!(flipped, (0.2 * observed as f64).round() as usize);
    }

    #[test]
    fn starved_observations_ruin_every_method() {
        let cfg = ExperimentConfig {
            n: 100,
            trials: 5,
            methods: vec![
                Method::Serialrank,
                Method::PointScore,
                Method::RankCentrality,
            ],
            sweep: SweepSpec {
                parameter: SweepParameter::MissingFraction,
                grid: vec![0.99],
            },
            fixed_noise: None,
            erdos_p: 1.0,
            seed: 13,
            output: PathBuf::from("unused"),
        };
        let result = run_sweep(&cfg).unwrap();
        for cell in &result.cells {
            assert!(
                cell.recovery_rate <= 0.2,
                "{} recovered {} of starved data",
                cell.method,
                cell.recovery_rate
            );
        }
    }

    #[test]
    fn local_range_sweep_runs_and_degrades_with_wider_windows() {
        let cfg = ExperimentConfig {
            n: 40,
            trials: 6,
            methods: vec![Method::Serialrank],
            sweep: SweepSpec {
                parameter: SweepParameter::LocalRange,
                grid: vec![2.0, 30.0],
            },
            fixed_noise: None,
            erdos_p: 1.0,
            seed: 17,
            output: PathBuf::from("unused"),
        };
        let result = run_sweep(&cfg).unwrap();
        // A wide uniform-noise window hides much more of the order than a
        // narrow one.
        assert!(result.cells[0].mean_tau > result.cells[1].mean_tau);
        assert!(result.cells[0].mean_tau > 0.9);
    }

    #[test]
    fn probe_is_exactly_zero_without_noise() {
        let table = run_perturbation_probe(32, &[1.0], 1.0, 3, 9).unwrap();
        assert_eq!(table.rows.len(), 1);
        let row = &table.rows[0];
        assert_eq!(row.misses, 0);
        assert_eq!(row.mean_fiedler_l2, 0.0);
        assert_eq!(row.mean_linf, 0.0);
    }

    #[test]
    fn probe_errors_shrink_as_observations_grow() {
        let table = run_perturbation_probe(64, &[0.2, 0.5, 1.0], 0.9, 20, 21).unwrap();
        let l2: Vec<f64> = table.rows.iter().map(|r| r.mean_fiedler_l2).collect();
        let linf: Vec<f64> = table.rows.iter().map(|r| r.mean_linf).collect();
        for series in [l2, linf] {
            let inversions = series
                .windows(2)
                .filter(|w| w[1] > w[0] + 1e-12)
                .count();
            assert!(inversions <= 1, "trend broke twice: {series:?}");
        }
    }

    #[test]
    fn probe_error_shrinks_when_n_doubles_at_fixed_q() {
        // Consistency trend: with the observation probability held fixed,
        // growing n drives the Fiedler perturbation toward zero.
        let small = run_perturbation_probe(64, &[0.5], 0.9, 30, 5).unwrap();
        let large = run_perturbation_probe(128, &[0.5], 0.9, 30, 5).unwrap();
        let small_l2 = small.rows[0].mean_fiedler_l2;
        let large_l2 = large.rows[0].mean_fiedler_l2;
        assert!(
            large_l2 <= small_l2,
            "doubling n grew the error: {small_l2} -> {large_l2}"
        );
    }

    #[test]
    fn probe_validates_its_arguments() {
        assert!(matches!(
            run_perturbation_probe(10, &[0.0], 0.9, 1, 0),
            Err(Error::InvalidParameter { name: "q", .. })
        ));
        assert!(matches!(
            run_perturbation_probe(10, &[0.5], 0.5, 1, 0),
            Err(Error::InvalidParameter { name: "p", .. })
        ));
        assert!(matches!(
            run_perturbation_probe(10, &[0.5], 0.9, 0, 0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            run_perturbation_probe(1, &[0.5], 0.9, 1, 0),
            Err(Error::TooSmall { .. })
        ));
    }

    fn round_robin_text(n: usize) -> String {
        let mut text = String::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                text.push_str(&format!("t{i},t{j},1\n"));
            }
        }
        text
    }

    #[test]
    fn rank_file_orders_a_consistent_round_robin() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("games.csv");
        fs::write(&input, round_robin_text(20)).unwrap();
        let opts = RankFileOptions {
            output: dir.path().join("out"),
            ..Default::default()
        };
        let report = rank_file(&input, &opts).unwrap();
        assert_eq!(report.ranks.len(), 20);
        // Labels appear in file order t1..t20, already best-to-worst.
        assert_eq!(report.ranks, (1..=20).collect::<Vec<_>>());
        for (k, u) in &report.upsets {
            assert_eq!(u.fraction, 0.0, "upsets at k = {k}");
        }
        assert_eq!(
            report.upsets.iter().map(|(k, _)| *k).collect::<Vec<_>>(),
            vec![10, 20]
        );

        let ranking = fs::read_to_string(&report.ranking_path).unwrap();
        let mut lines = ranking.lines();
        assert_eq!(lines.next(), Some("rank,label,value"));
        assert!(lines.next().unwrap().starts_with("1,t1,"));
        assert_eq!(ranking.lines().count(), 21);
        let upsets = fs::read_to_string(&report.upsets_path).unwrap();
        assert_eq!(upsets.lines().count(), 3);
    }

    #[test]
    fn rank_file_merges_the_topk_cutoff() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("games.csv");
        fs::write(&input, round_robin_text(12)).unwrap();
        let opts = RankFileOptions {
            method: Method::PointScore,
            topk: Some(5),
            output: dir.path().join("out"),
            ..Default::default()
        };
        let report = rank_file(&input, &opts).unwrap();
        assert_eq!(
            report.upsets.iter().map(|(k, _)| *k).collect::<Vec<_>>(),
            vec![5, 10, 12]
        );
        // Out-of-range cutoffs are dropped rather than erroring.
        let opts = RankFileOptions {
            topk: Some(99),
            output: dir.path().join("out2"),
            ..Default::default()
        };
        let report = rank_file(&input, &opts).unwrap();
        assert_eq!(
            report.upsets.iter().map(|(k, _)| *k).collect::<Vec<_>>(),
            vec![10, 12]
        );
    }

    #[test]
    fn rank_file_averages_duplicate_fixtures_like_single_lines() {
        let dir = tempfile::tempdir().unwrap();
        // a beat b twice, written once from each perspective.
        let duplicated = dir.path().join("dup.csv");
        fs::write(&duplicated, "a,b,1\nb,a,-1\nb,c,1\na,c,1\n").unwrap();
        let single = dir.path().join("single.csv");
        fs::write(&single, "a,b,1\nb,c,1\na,c,1\n").unwrap();

        let mut outputs = Vec::new();
        for (input, out) in [(&duplicated, "out-dup"), (&single, "out-single")] {
            let opts = RankFileOptions {
                output: dir.path().join(out),
                ..Default::default()
            };
            let report = rank_file(input, &opts).unwrap();
            outputs.push(fs::read_to_string(&report.ranking_path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1]);
    }

    #[test]
    fn rank_file_names_disconnected_components_by_label() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("split.csv");
        fs::write(&input, "ape,bat,1\ncat,dog,1\n").unwrap();
        let opts = RankFileOptions {
            method: Method::RankCentrality,
            output: dir.path().join("out"),
            ..Default::default()
        };
        let err = rank_file(&input, &opts).unwrap_err();
        match &err {
            Error::DisconnectedLabels { groups } => {
                assert_eq!(groups.len(), 2);
                assert_eq!(groups[0], vec!["ape".to_string(), "bat".to_string()]);
            }
            other => panic!("expected DisconnectedLabels, got {other}"),
        }
        let message = err.to_string();
        assert!(message.contains("ape") && message.contains("dog"), "{message}");
    }

    #[test]
    fn rank_file_surfaces_parse_errors_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("bad.csv");
        fs::write(&input, "a,b,1\nnot a row\n").unwrap();
        let err = rank_file(&input, &RankFileOptions::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected Parse, got {other}"),
        }
    }

    #[test]
    fn diagnose_reports_the_whole_pipeline() {
        let c = ComparisonMatrix::full_consistent(6).unwrap();
        let d = diagnose(&c, &SerialRankOptions::default()).unwrap();
        assert_eq!(d.n, 6);
        assert_eq!(d.similarity, "match");
        assert_eq!(d.laplacian, "unnormalized");
        assert_eq!(d.eigenvalues.len(), 3);
        assert!(d.eigenvalues[0].abs() < 1e-8);
        assert_eq!(d.fiedler.len(), 6);
        assert!(d.fiedler_simple);
        assert!(!d.repeated_fiedler_entries);
        assert!(d.is_r && d.is_strict_r);
        assert_eq!(d.ranks, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(d.upsets, 0);
        let json = serde_json::to_string_pretty(&d).unwrap();
        assert!(json.contains("\"fiedler_simple\": true"));
    }
}
