//! Command-line front end: rank a comparison file, run benchmark sweeps from
//! a JSON config, probe Fiedler-vector perturbation against observation
//! density, or dump pipeline diagnostics as JSON.
//!
//! Exit codes: 0 on success, 2 for usage and configuration errors (including
//! those found by argument parsing), 1 for everything that fails at runtime.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serialrank::compdata::ingest_matchlist_path;
use serialrank::harness::{
    diagnose, rank_file, run_perturbation_probe, run_sweep, write_sweep_outputs,
    ExperimentConfig, Method, RankFileOptions,
};
use serialrank::spectral::{build_similarity, LaplacianKind, SerialRankOptions, SimilarityKind};
use serialrank::{Error, Result};

#[derive(Parser)]
#[command(
    name = "serialrank",
    version,
    about = "Rank items from pairwise comparisons by spectral seriation, \
             with score baselines and a benchmark harness"
)]
struct Cli {
    /// Base seed for the randomized subcommands. `rank` and `diagnose` are
    /// deterministic and accept it for interface uniformity.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank the items of a match-list file and write ranking and upset CSVs.
    Rank {
        /// Match-list CSV: one `item_a,item_b,outcome` row per comparison,
        /// outcome in [-1, 1] where 1 means the first item won.
        file: PathBuf,

        #[arg(long, value_enum, default_value_t = Method::Serialrank)]
        method: Method,

        /// Similarity construction used by the spectral methods.
        #[arg(long, value_enum, default_value = "match")]
        similarity: SimilarityArg,

        /// Laplacian whose Fiedler vector orders the items.
        #[arg(long, value_enum, default_value = "unnorm")]
        laplacian: LaplacianArg,

        /// Entrywise power applied to the similarity before the spectral
        /// step.
        #[arg(long)]
        contrast: Option<f64>,

        /// Extra cutoff merged into the default upset-table set
        /// {10, 25, 50, 100, n}.
        #[arg(long)]
        topk: Option<usize>,

        /// Directory receiving ranking.csv and upsets.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },

    /// Run the benchmark sweep described by a JSON configuration file.
    Bench {
        /// Experiment description; see ExperimentConfig for the schema.
        #[arg(long)]
        config: PathBuf,
    },

    /// Measure Fiedler-vector perturbation of the debiased similarity over a
    /// grid of observation probabilities.
    Probe {
        /// Number of items.
        #[arg(long)]
        n: usize,

        /// Probability that an observed comparison keeps its true direction.
        #[arg(long, default_value_t = 1.0)]
        p: f64,

        /// Comma-separated observation probabilities to sweep.
        #[arg(long, value_delimiter = ',', required = true)]
        q_grid: Vec<f64>,

        /// Random trials per grid point.
        #[arg(long, default_value_t = 50)]
        trials: usize,

        /// Directory receiving probe.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },

    /// Print pipeline diagnostics for a match-list file as JSON.
    Diagnose {
        /// Match-list CSV, same format as `rank`.
        file: PathBuf,

        #[arg(long, value_enum, default_value = "match")]
        similarity: SimilarityArg,

        #[arg(long, value_enum, default_value = "unnorm")]
        laplacian: LaplacianArg,

        #[arg(long)]
        contrast: Option<f64>,

        /// Also write the similarity matrix as CSV to this path.
        #[arg(long)]
        dump_similarity: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum SimilarityArg {
    Match,
    Glm,
    Cardinal,
}

impl From<SimilarityArg> for SimilarityKind {
    fn from(a: SimilarityArg) -> Self {
        match a {
            SimilarityArg::Match => SimilarityKind::Match,
            SimilarityArg::Glm => SimilarityKind::Glm,
            SimilarityArg::Cardinal => SimilarityKind::Cardinal,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum LaplacianArg {
    Unnorm,
    Norm,
}

impl From<LaplacianArg> for LaplacianKind {
    fn from(a: LaplacianArg) -> Self {
        match a {
            LaplacianArg::Unnorm => LaplacianKind::Unnormalized,
            LaplacianArg::Norm => LaplacianKind::Normalized,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Usage and configuration mistakes exit 2; failures of a well-posed run
/// (unreadable or malformed data, disconnection, non-convergence) exit 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) | Error::InvalidParameter { .. } | Error::Json(_) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Rank {
            file,
            method,
            similarity,
            laplacian,
            contrast,
            topk,
            out,
        } => {
            let opts = RankFileOptions {
                method,
                similarity: similarity.into(),
                laplacian: laplacian.into(),
                contrast_alpha: contrast,
                topk,
                output: out,
            };
            let report = rank_file(&file, &opts)?;
            println!("ranked {} items with {}", report.ranks.len(), method);
            println!("wrote {}", report.ranking_path.display());
            println!("wrote {}", report.upsets_path.display());
            Ok(())
        }
        Command::Bench { config } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let result = run_sweep(&cfg)?;
            let (summary, trials, plot) = write_sweep_outputs(&cfg, &result)?;
            for path in [summary, trials, plot] {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Probe {
            n,
            p,
            q_grid,
            trials,
            out,
        } => {
            let table = run_perturbation_probe(n, &q_grid, p, trials, cli.seed.unwrap_or(0))?;
            fs::create_dir_all(&out)?;
            let path = out.join("probe.csv");
            fs::write(&path, table.to_csv())?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Diagnose {
            file,
            similarity,
            laplacian,
            contrast,
            dump_similarity,
        } => {
            let c = ingest_matchlist_path(&file)?;
            let opts = SerialRankOptions {
                similarity: similarity.into(),
                laplacian: laplacian.into(),
                contrast_alpha: contrast,
            };
            let report = diagnose(&c, &opts)?;
            if let Some(path) = dump_similarity {
                let sim = build_similarity(&c, &opts)?;
                fs::write(&path, sim.to_csv(c.labels()))?;
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
    }
}
