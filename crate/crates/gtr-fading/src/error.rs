use thiserror::Error;

/// Errors raised by the fading library.
///
/// Every variant names the invariant or computation that failed, so callers
/// (the CLI in particular) can surface it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error in {function}: {reason}")]
    Domain {
        function: &'static str,
        reason: String,
    },

    #[error("{what} did not converge after {evals} evaluations (error estimate {error:e})")]
    NonConvergence {
        what: &'static str,
        evals: usize,
        error: f64,
    },
}

impl Error {
    pub(crate) fn domain(function: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            function,
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(reason: impl Into<String>) -> Self {
        Error::InvalidParameter(reason.into())
    }

    /// True for numerical failures, as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
