//! Error type shared by every module in the crate.

use thiserror::Error;

/// Everything that can go wrong when building or running a simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// A coordinate fell outside the grid. `axis` names the offending
    /// axis (`"x"` or `"y"`), `extent` is the exclusive upper bound.
    #[error("{axis} coordinate {value} out of bounds for grid extent {extent}")]
    OutOfBounds {
        axis: &'static str,
        value: u32,
        extent: u32,
    },

    /// A configuration value violated its documented range. `key` names
    /// the offending field so callers can point users at it.
    #[error("invalid value for `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    /// An operation was invoked in a state it does not accept (stepping a
    /// dead agent, metrics over an empty trajectory, mismatched lengths).
    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    /// Convenience constructor for [`Error::InvalidConfig`].
    pub fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Convenience constructor for [`Error::Usage`].
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
