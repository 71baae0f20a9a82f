use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An input is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller broke a precondition: wrong vector length, invalid state, ...
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A configuration file or value is inconsistent.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A data structure failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("target at distance {distance:.6} m is beyond the arm reach of {reach:.6} m")]
    Unreachable { distance: f64, reach: f64 },

    #[error("inverse kinematics did not converge after {iters} iterations (best residual {residual:.3e} m)")]
    NoSolution { residual: f64, iters: usize },

    #[error("object '{0}' is outside the camera field of view")]
    NotVisible(String),
}

impl Error {
    /// Stable machine-readable discriminant, used in CLI error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "Domain",
            Error::ContractViolation(_) => "ContractViolation",
            Error::Configuration(_) => "Configuration",
            Error::Validation(_) => "Validation",
            Error::Unreachable { .. } => "Unreachable",
            Error::NoSolution { .. } => "NoSolution",
            Error::NotVisible(_) => "NotVisible",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
