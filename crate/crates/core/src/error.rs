use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid scale: {0}")]
    InvalidScale(String),

    #[error("resolution {requested} exceeds the dense covariance limit of {limit}")]
    DenseCapacity { requested: u32, limit: u32 },

    #[error("covariance not positive semidefinite beyond jitter tolerance (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("circulant embedding clipped an eigenvalue of magnitude {magnitude:e} (tolerance {tolerance:e})")]
    EmbeddingClip { magnitude: f64, tolerance: f64 },

    #[error("resolution mismatch: {0}")]
    ResolutionMismatch(String),

    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),

    #[error("degenerate map: {0}")]
    DegenerateMap(String),

    #[error("interval [{left}, {right}) is not dyadic at any level up to {max_level}")]
    NonDyadicInterval { left: f64, right: f64, max_level: u32 },

    #[error("measure is not a probability measure (total {total})")]
    NotProbability { total: f64 },

    #[error("unsupported Riesz exponent {0} (must lie in (0, 1))")]
    UnsupportedExponent(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("quadrature did not converge: lower tail {lower_tail:e}, upper tail {upper_tail:e}")]
    QuadratureNotConverged { lower_tail: f64, upper_tail: f64 },

    #[error("optimizer did not converge after {iterations} iterations (gradient norm {gradient_norm:e}, duality gap {gap:e})")]
    NotConverged {
        iterations: usize,
        gradient_norm: f64,
        gap: f64,
    },

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Wraps the error with a short description of what was being attempted.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for failures of numerical procedures (as opposed to usage, config or IO problems).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NotPositiveDefinite { .. }
            | Error::EmbeddingClip { .. }
            | Error::DegenerateMeasure(_)
            | Error::DegenerateMap(_)
            | Error::QuadratureNotConverged { .. }
            | Error::NotConverged { .. }
            | Error::InsufficientData(_) => true,
            Error::Context { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
