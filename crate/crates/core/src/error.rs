use thiserror::Error;

/// Errors raised by the simulation primitives and the protocol layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computed quantity violated an internal consistency bound.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A matrix or state does not have the required structure.
    #[error("structural error: {0}")]
    Structural(String),

    /// Threshold search bracket does not straddle the zero/positive boundary.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// The truncated Fock basis cannot faithfully hold the requested state.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// Malformed configuration text or sweep description.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Same kind of error with `context` prepended to the message.
    pub fn context(self, context: impl std::fmt::Display) -> Error {
        let wrap = |m: String| format!("{context}: {m}");
        match self {
            Error::Domain(m) => Error::Domain(wrap(m)),
            Error::Numerical(m) => Error::Numerical(wrap(m)),
            Error::Structural(m) => Error::Structural(wrap(m)),
            Error::Bracket(m) => Error::Bracket(wrap(m)),
            Error::Truncation(m) => Error::Truncation(wrap(m)),
            Error::Parse(m) => Error::Parse(wrap(m)),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn ensure_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be finite, got {v}"))
    }
}
