use thiserror::Error;

/// Errors raised by the numerical engine and its front ends.
#[derive(Debug, Error)]
pub enum Error {
    /// Wrong kind of input for the operation (point variant mismatch, misuse of a space kind).
    #[error("usage error: {0}")]
    Usage(String),

    /// Argument outside the mathematical domain (non-positive radius, `b <= 0`, `p < 1`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A descriptor, point or number failed to parse.
    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },

    /// Loaded data violates a documented invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Non-finite evaluation or a numerical procedure that could not produce a value.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Inputs outside what the search procedures can bracket.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Parse { .. } | Error::Config(_) | Error::Validation(_) => 2,
            Error::Domain(_) | Error::Numeric(_) | Error::Unsupported(_) => 3,
            Error::Io(_) => 3,
        }
    }
}
