use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside an operation's contract (bad box, bad shape, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A real-valued function evaluated outside the region where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An internal invariant failed. Never clamped or ignored.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("integer overflow while {0}")]
    Overflow(String),

    /// Power iteration did not settle; carries the last iterate for diagnosis.
    #[error(
        "power iteration did not converge after {iterations} iterations \
         (last estimate {last_estimate}, residual {residual:e})"
    )]
    NonConvergence {
        iterations: usize,
        last_estimate: f64,
        residual: f64,
        last_vector: Vec<f64>,
    },

    #[error("table cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for errors caused by the caller's input rather than by a
    /// computation going wrong.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parameter(_) | Error::Domain(_))
    }
}
