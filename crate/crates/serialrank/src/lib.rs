//! Ranking items from pairwise comparisons by spectral seriation.
//!
//! The pipeline: turn (possibly noisy, possibly incomplete) pairwise
//! comparisons into a pairwise similarity matrix, take the Fiedler vector of
//! its graph Laplacian, and read the ranking off the sorted Fiedler entries,
//! oriented to disagree with as few observed comparisons as possible. On
//! consistent input the similarity is a strict Robinson matrix and the
//! recovered ranking is exact; the [`similarity`] module exposes the Robinson
//! structure checks that make that statement testable.
//!
//! Modules:
//!
//! * [`compdata`]: comparison matrices, noise models, generative draws,
//!   match-list ingestion.
//! * [`similarity`]: similarity constructions and Robinson-matrix checks.
//! * [`spectral`]: Laplacians, Fiedler vectors, the seriation ranker and its
//!   asymptotic eigenvector approximation.
//! * [`baselines`]: point score, Rank Centrality, Bradley-Terry-Luce MLE.
//! * [`metrics`]: Kendall tau, top-k upset fractions, displacement,
//!   eigenvector perturbation error.
//! * [`harness`]: reproducible Monte Carlo sweeps, perturbation probes, file
//!   ranking and plot/CSV emission for the `serialrank` binary.

#![forbid(unsafe_code)]

pub mod baselines;
pub mod compdata;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod similarity;
pub mod spectral;

#[cfg(test)]
pub(crate) mod test_support;

pub use error::{Error, Result};
