use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty data set")]
    EmptyData,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max |a_ij - conj(a_ji)| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("Hermitian eigensolver did not converge")]
    EigenNoConvergence,

    #[error("matrix is materially indefinite: min eigenvalue {min:e} vs spectral norm {norm:e}")]
    Indefinite { min: f64, norm: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gauge contract violated: {0}")]
    GaugeContract(String),

    #[error("datum {index} is degenerate (squared norm {norm2:e})")]
    DegenerateDatum { index: usize, norm2: f64 },

    #[error("fixed-point estimator needs K >= n (K = {k}, n = {n})")]
    InsufficientSupport { k: usize, n: usize },

    #[error("fixed-point iteration did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("unknown estimator `{name}`; available: {registry}")]
    UnknownEstimator { name: String, registry: String },

    #[error("estimator `{0}` is not implemented here (its algorithm belongs to an external reference)")]
    OutOfScope(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenNoConvergence
                | Error::Indefinite { .. }
                | Error::Singular
                | Error::GaugeContract(_)
                | Error::NoConvergence(_)
        )
    }
}
