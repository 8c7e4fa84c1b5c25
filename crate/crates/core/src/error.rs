use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the encoder, decoder and harness can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("signal length {0} must be even and at least 2")]
    InvalidLength(usize),

    #[error("inverse transform left an imaginary residue of {residue:e} (limit {limit:e})")]
    NonRealResult { residue: f64, limit: f64 },

    #[error("sparsity {m} exceeds the {max} available bins")]
    InvalidSparsity { m: usize, max: usize },

    #[error("sigma {sigma} is not invertible modulo {n}")]
    NotCoprime { sigma: u64, n: u64 },

    #[error("cannot build a bank of {t} filters over length {n}: need n even and t dividing n/2")]
    BadBankShape { n: usize, t: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("filter {filter} captured {count} frequencies")]
    ShatterCollision { filter: usize, count: usize },

    #[error("no sigma below {n} separates the support into {t} filters")]
    NoValidSigma { n: usize, t: usize },

    #[error("measurement angle {angle} is {offset:e} rad away from the nearest grid bin {alpha}")]
    OffGridAngle { angle: f64, alpha: usize, offset: f64 },

    #[error("pursuit stopped at relative residual {relative_residual:e} after {iterations} atoms")]
    NoConvergence { relative_residual: f64, iterations: usize },

    #[error("bad dimensions: {0}")]
    BadDimensions(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid file contents: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable variant name, printed by the CLI on failure.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidLength(_) => "InvalidLength",
            Error::NonRealResult { .. } => "NonRealResult",
            Error::InvalidSparsity { .. } => "InvalidSparsity",
            Error::NotCoprime { .. } => "NotCoprime",
            Error::BadBankShape { .. } => "BadBankShape",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::ShatterCollision { .. } => "ShatterCollision",
            Error::NoValidSigma { .. } => "NoValidSigma",
            Error::OffGridAngle { .. } => "OffGridAngle",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::BadDimensions(_) => "BadDimensions",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Format(_) => "Format",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }

    /// True for errors raised by the signal model rather than by I/O.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Format(_))
    }
}
