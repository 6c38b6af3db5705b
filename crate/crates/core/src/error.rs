use thiserror::Error;

use crate::quadrature::QuadError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("geometry domain error: {0}")]
    Domain(String),

    #[error("invalid link {0}")]
    InvalidLink(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("quadrature failed in {integral}: {source}")]
    Quadrature { integral: String, source: QuadError },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Attach an integral label to an unlabeled quadrature failure.
    pub fn in_integral(self, label: &str) -> Self {
        match self {
            Error::Quadrature { integral, source } if integral.is_empty() => Error::Quadrature {
                integral: label.to_string(),
                source,
            },
            other => other,
        }
    }
}

impl From<QuadError> for Error {
    fn from(source: QuadError) -> Self {
        Error::Quadrature {
            integral: String::new(),
            source,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
