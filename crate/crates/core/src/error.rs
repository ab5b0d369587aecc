use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an evaluator.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("edge {index} has zero length")]
    ZeroLengthEdge { index: usize },

    #[error("non-finite component in edge {index}")]
    NonFinite { index: usize },

    #[error("operation requires dimension {expected}, polygon has dimension {found}")]
    UnsupportedDimension { expected: usize, found: usize },

    #[error("polygon fails to close: relative defect {defect:e} exceeds {tolerance:e}")]
    NotClosed { defect: f64, tolerance: f64 },

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error(
        "quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e} after {evaluations} evaluations"
    )]
    Convergence {
        estimate: f64,
        error_bound: f64,
        evaluations: usize,
    },

    /// A functional failed on a Monte Carlo sample. `stream` and `index` locate
    /// the offending sample so it can be regenerated.
    #[error("sample {index} of stream {stream} (seed {seed}): {source}")]
    Sample {
        seed: u64,
        stream: u64,
        index: usize,
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
