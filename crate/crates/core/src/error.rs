use num_complex::Complex64;
use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid tableau: {0}")]
    Validation(String),
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("malformed path configuration: {0}")]
    MalformedConfig(String),
    #[error("query error: {0}")]
    Query(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("capacity exceeded: {what} needs {size} entries (limit {limit})")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("outside analyticity domain at {at}; nearest singularity {nearest}")]
    Domain { at: Complex64, nearest: Complex64 },
    #[error("pole at {0}")]
    Pole(Complex64),
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("stencil leaves the liquid region: {0}")]
    Margin(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{module}: {source}")]
    Module {
        module: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Tags an error with the module it surfaced from.
    pub fn in_module(self, module: &'static str) -> Self {
        Error::Module {
            module,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
