//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, ingestion, solvers and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Input has fewer items than the operation supports.
    #[error("need at least {min} items, got {n}")]
    TooSmall { n: usize, min: usize },

    /// Two inputs that must agree in shape do not.
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A numeric argument is outside its documented range.
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A stored matrix violates a structural invariant (antisymmetry,
    /// symmetry, mask consistency, value range).
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// Malformed line in a match-list file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Outcome outside [-1, 1] in a match-list file.
    #[error("outcome {value} out of range [-1, 1] at line {line}")]
    OutcomeRange { line: usize, value: f64 },

    /// A match-list file contained no usable rows.
    #[error("input contains no comparisons")]
    EmptyInput,

    /// Noise parameters carry no recoverable signal (p <= 1/2 under the
    /// random-flip model makes the debiasing factor vanish or flip sign).
    #[error("degenerate noise parameters: q = {q}, p = {p} ({reason})")]
    DegenerateNoise { q: f64, p: f64, reason: &'static str },

    /// A normalized Laplacian was requested but an item has nonpositive
    /// total similarity.
    #[error("item {item} has nonpositive degree {degree}; normalized Laplacian undefined")]
    DegenerateDegree { item: usize, degree: f64 },

    /// The positive-similarity (or comparison) graph splits into components.
    #[error("graph is disconnected: {} components, sizes {:?}", components.len(), components.iter().map(Vec::len).collect::<Vec<_>>())]
    Disconnected { components: Vec<Vec<usize>> },

    /// Disconnected input reported by item label, for file-based workflows.
    #[error("comparison graph is disconnected: {}", render_groups(groups))]
    DisconnectedLabels { groups: Vec<Vec<String>> },

    /// An iterative solver ran out of iterations.
    #[error("{method} did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// Brute-force permutation checks are factorial and capped.
    #[error("brute-force check limited to n <= {max}, got n = {n}")]
    BruteForceTooLarge { n: usize, max: usize },

    /// A vector that must be unit-norm is not.
    #[error("expected a unit vector, got norm {norm}")]
    NotUnit { norm: f64 },

    /// Experiment configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("configuration JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn render_groups(groups: &[Vec<String>]) -> String {
    groups
        .iter()
        .map(|g| format!("[{}]", g.join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}

pub type Result<T> = std::result::Result<T, Error>;
