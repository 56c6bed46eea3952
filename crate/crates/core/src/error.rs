use thiserror::Error;

/// Errors produced by the amplification library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument `{name}`: {reason}")]
    Usage { name: &'static str, reason: String },

    /// The instance is larger than an enumeration or solver guard allows.
    #[error("capacity guard `{guard}` exceeded: {value} > {limit}")]
    Capacity {
        guard: &'static str,
        limit: usize,
        value: usize,
    },

    /// Hoeffding bracket requested where `p + K > 1/2`.
    #[error("bracket precondition failed: p + K = {p} + {k_factor} exceeds 1/2")]
    BracketPrecondition { p: f64, k_factor: f64 },

    /// The requested operation is not defined for these parameters.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn usage(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Usage {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
