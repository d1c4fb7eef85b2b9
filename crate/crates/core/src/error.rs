use thiserror::Error;

use crate::profiles::ValidationReport;

/// Errors produced by the spectral toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is admissible in principle but numerically degenerate.
    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),

    /// Exact integer arithmetic overflowed.
    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    /// A profile failed validation.
    #[error("invalid profile: {0}")]
    InvalidProfile(ValidationReport),

    /// The requested computation needs more modes or grid points than configured.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A root bracket did not contain a sign change.
    #[error("bracket failure: {0}")]
    Bracket(String),

    /// The checked mode-ordering assumption of the spectrum sweep was violated.
    #[error("mode ordering violated: {0}")]
    ModeOrdering(String),

    /// A quantity that must be positive came out non-positive at the configured resolution.
    #[error("resolution failure: {0}")]
    Resolution(String),

    /// An internal consistency check failed.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by invalid input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::IllConditioned(_) | Error::InvalidProfile(_)
        )
    }

    /// Short machine-readable kind tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::IllConditioned(_) => "ill_conditioned",
            Error::Overflow(_) => "overflow",
            Error::InvalidProfile(_) => "invalid_profile",
            Error::Resource(_) => "resource",
            Error::Bracket(_) => "bracket",
            Error::ModeOrdering(_) => "mode_ordering",
            Error::Resolution(_) => "resolution",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
