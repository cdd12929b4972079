use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter or manifest field failed validation.
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} > tolerance {tolerance:e}")]
    Quadrature { estimate: f64, error: f64, tolerance: f64 },

    /// The truncation radius is undefined because `n x⁻² E[X² I(|X| ≤ x)]`
    /// never reaches one.
    #[error("degenerate distribution {0}: no x with n x^-2 E[X^2 I(|X|<=x)] >= 1")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Validation failures are the caller's fault; everything else is numerical.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Invalid { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
