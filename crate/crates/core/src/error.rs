use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("{algorithm} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        algorithm: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {message} (margin {margin:e})")]
    Precondition { message: String, margin: f64 },

    /// A function lacks the class certificate a check assumes.
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("contour geometry: {0}")]
    Geometry(String),

    #[error("quadrature did not reach tolerance with {nodes} nodes (last Cauchy difference {last_difference:e})")]
    Accuracy { nodes: usize, last_difference: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("constraint violated on `{field}`: {message}")]
    Constraint { field: String, message: String },

    #[error("sampler: {0}")]
    Sampler(String),

    #[error("campaign: {0}")]
    Campaign(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
