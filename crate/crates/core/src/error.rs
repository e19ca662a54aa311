use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// A queue whose arrival rate reaches its service rate has no stationary regime.
    #[error("unstable queue for {context}: arrival rate {arrival_rate} /s >= service rate {service_rate} /s")]
    Unstable {
        context: String,
        arrival_rate: f64,
        service_rate: f64,
    },

    #[error("invalid allocation policy: {0}")]
    InvalidPolicy(String),

    #[error("cannot build an empirical CCDF from zero samples")]
    EmptySamples,

    #[error("reliability {reliability} is unreachable: smallest tail on the grid is {min_tail:e}")]
    UnreachableReliability { reliability: f64, min_tail: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Io(#[from] io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }
}
