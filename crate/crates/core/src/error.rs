use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// `‖b − Aᵀx‖_*` vanished, so the closed-form distance does not apply.
    #[error("degenerate direction: dual norm of b - A^T x is {norm:e}")]
    DegenerateDirection { norm: f64 },

    #[error("point is not degenerate (dual norm of b - A^T x is {norm:e})")]
    NotDegenerate { norm: f64 },

    #[error("domain is unbounded in variable {var}; supply an application big-M rule")]
    UnboundedDomain { var: usize },

    #[error("invalid big-M value {value} for scenario {scenario}")]
    InvalidBigM { scenario: usize, value: f64 },

    #[error("invalid quantile for scenario {scenario}, row {row}: {reason}")]
    InvalidQuantile {
        scenario: usize,
        row: usize,
        reason: String,
    },

    #[error("every single-scenario subproblem is infeasible")]
    AllInfeasible,

    #[error("coefficient supports differ between scenarios {i} and {j} on row {row}")]
    SupportMismatch { i: usize, j: usize, row: usize },

    #[error("row {row} of scenario {scenario} is neither covering nor packing")]
    SignViolation { scenario: usize, row: usize },

    #[error("scenario {scenario} is infeasible for resource {resource} (demand group {group} cannot be met)")]
    InfeasibleScenario {
        scenario: usize,
        resource: usize,
        group: usize,
    },

    #[error("yield data must be strictly positive (min coordinate {min})")]
    NonpositiveYield { min: f64 },

    #[error("index {index} is redundant (sorted position {position} > k = {k})")]
    RedundantIndex {
        index: usize,
        position: usize,
        k: usize,
    },

    #[error("cut enumeration over k = {k} top indices would explode (limit 20)")]
    TooManySubsets { k: usize },

    #[error("oracle enumeration limited to 16 scenarios, got {n}")]
    TooManyScenarios { n: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("no incumbent available")]
    NoIncumbent,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
