use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("{function} overflows at {argument}")]
    Overflow { function: &'static str, argument: f64 },

    #[error("{function} did not converge after {iterations} iterations (argument {argument})")]
    NoConvergence {
        function: &'static str,
        iterations: usize,
        argument: f64,
    },

    #[error("truncation N={n} too small: tail weight {tail:e} exceeds {limit:e}")]
    Truncation { n: usize, tail: f64, limit: f64 },

    #[error("basis mismatch: {left} vs {right}")]
    BasisMismatch { left: String, right: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix function unreliable: eigenvector condition {condition:e} (limit {limit:e})")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("quadrature under-resolved: node-doubling drift {drift:e} exceeds {limit:e}")]
    UnderResolved { drift: f64, limit: f64 },

    #[error("wavepacket does not vanish at the grid edge: |psi| = {edge:e} relative to peak (limit {limit:e})")]
    BoundaryDecay { edge: f64, limit: f64 },

    #[error("matrix exponential overflowed (norm {norm:e})")]
    ExpOverflow { norm: f64 },

    #[error("singular matrix in {context}")]
    Singular { context: &'static str },

    #[error("config: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
