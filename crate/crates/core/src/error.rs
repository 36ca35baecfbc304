use thiserror::Error;

/// Errors raised by the estimation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// The maximum-likelihood estimate of `alpha{param}` lies on the boundary of
    /// the parameter space.
    #[error("MLE of alpha{param} lies on the boundary: {reason}")]
    Boundary { param: usize, reason: String },

    #[error("EM did not converge after {iterations} iterations (last iterate {last:?})")]
    NotConverged { iterations: usize, last: [f64; 3] },

    #[error("optimizer failed: {0}")]
    Optimizer(String),

    #[error("observed information matrix is singular")]
    Singular,

    #[error("slice sampler: shrinkage exhausted after {0} proposals")]
    ShrinkExhausted(usize),

    #[error("slice sampler: log-density is not finite at the current point {0}")]
    NonFiniteStart(f64),

    #[error("chain failed at sweep {sweep}, alpha{coord}: {source}")]
    Chain {
        sweep: usize,
        coord: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("empty chain")]
    EmptyChain,

    #[error("credible interval: {0}")]
    Interval(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: expected two columns, found {found}")]
    Format { line: usize, found: usize },

    #[error("negative standardized coordinates on rows {0:?}")]
    NegativeRows(Vec<usize>),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code for the CLI: 1 usage/config, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Parse { .. }
            | Error::Format { .. }
            | Error::NegativeRows(_)
            | Error::Io(_)
            | Error::Degenerate(_)
            | Error::Domain(_) => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
