use thiserror::Error;

use crate::evolution::TrajectoryRecord;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The delta-potential ground state exists only for ω > γ²/2.
    #[error("no ground state with the point interaction for omega = {omega}, gamma = {gamma} (requires omega > gamma^2/2)")]
    NoGroundState { omega: f64, gamma: f64 },

    #[error("data is not even: max |f - Rf| = {max_defect:e} exceeds {tolerance:e}")]
    SymmetryViolation { max_defect: f64, tolerance: f64 },

    #[error("grid window too small: need 2R = {required} <= L = {available}")]
    DomainTooSmall { required: f64, available: f64 },

    /// Non-finite values appeared during time stepping. Carries the
    /// trajectory recorded up to the last finite state.
    #[error("numerical overflow at t = {time} (step {step})")]
    NumericalOverflow {
        time: f64,
        step: u64,
        partial: Box<TrajectoryRecord>,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfiguration(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::InvalidConfiguration(e.to_string())
    }
}
