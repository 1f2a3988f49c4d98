use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid noise spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("nonstationary noise filter: |coeff| = {coeff} must be < 1")]
    NonstationaryFilter { coeff: f64 },

    #[error("nonstationary system: |lambda| = {lambda} must be < 1")]
    NonstationarySystem { lambda: f64 },

    #[error("insufficient length: need at least {needed} samples, got {got}")]
    InsufficientLength { needed: usize, got: usize },

    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),

    #[error("degenerate process: second moment Psi(0) + mean^2 is zero")]
    DegenerateProcess,

    #[error(
        "non-identifiable: normal matrix is singular or ill-conditioned \
         (condition number {condition:e}); the cost has infinitely many global minima"
    )]
    NonIdentifiable { condition: f64 },

    #[error("batch {index} failed: {source}")]
    BatchFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Field-level configuration error.
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the command-line front end.
    ///
    /// 1 for validation problems, 2 for numerical failures. Band failures
    /// (code 3) are not errors and are reported by the caller.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidSpec(_)
            | Error::InvalidArgument(_)
            | Error::NonstationaryFilter { .. }
            | Error::NonstationarySystem { .. }
            | Error::InsufficientLength { .. }
            | Error::UnsupportedScenario(_)
            | Error::Config { .. }
            | Error::Io(_)
            | Error::Json(_) => 1,
            Error::DegenerateProcess | Error::NonIdentifiable { .. } => 2,
            Error::BatchFailed { source, .. } => source.exit_code(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
