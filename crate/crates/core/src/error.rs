use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {max_asymmetry:.3e})")]
    NotHermitian { max_asymmetry: f64 },

    #[error("not a density matrix: {reason}")]
    InvalidDensity { reason: String },

    #[error("state vector is not normalized (norm = {norm:.15})")]
    NotNormalized { norm: f64 },

    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("out of formula domain: {0}")]
    OutOfDomain(String),

    #[error("norm drift {drift:.3e} during evolution")]
    NormDrift { drift: f64 },

    #[error("closed-form capacity {closed_form} disagrees with definitional {definitional}")]
    CapacityMismatch { definitional: f64, closed_form: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Stable short identifier, used in CSV error cells.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "not_hermitian",
            Error::InvalidDensity { .. } => "invalid_density",
            Error::NotNormalized { .. } => "not_normalized",
            Error::NonPositiveTemperature(_) => "non_positive_temperature",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::OutOfDomain(_) => "out_of_domain",
            Error::NormDrift { .. } => "norm_drift",
            Error::CapacityMismatch { .. } => "capacity_mismatch",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
