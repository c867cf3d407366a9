//! Error type shared across the crate.
//!
//! Scalar payloads are stored as `f64` regardless of the working scalar type;
//! they are diagnostics, not data the solver computes with.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: requires finite a < b, got a={a}, b={b}")]
    InvalidInterval { a: f64, b: f64 },

    #[error("point {x} lies outside the open interval ({a}, {b})")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("inverted or invalid bounds: lo={lo}, hi={hi}")]
    InvalidBounds { lo: f64, hi: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("solvability hypothesis violated at x={position}: theta_r={theta_r}, theta_{{1-r}}={theta_complement}")]
    HypothesisViolation {
        position: f64,
        theta_r: f64,
        theta_complement: f64,
    },

    #[error("alpha density must be positive, got {value}")]
    NonPositiveDensity { value: f64 },

    #[error("operation undefined for the trivial solution")]
    TrivialSolution,

    #[error("solutions belong to different problems")]
    MismatchedProblems,

    #[error("solutions are linearly dependent")]
    DependentSolutions,

    #[error("operation requires balanced solutions (r = 1/2): {0}")]
    UnsupportedMode(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("generator configuration is unsatisfiable: {0}")]
    Unsatisfiable(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
