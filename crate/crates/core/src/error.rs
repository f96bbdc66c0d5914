use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unknown agent {0:?}")]
    UnknownAgent(String),

    #[error("allocation is not a partition: {}", .0.join("; "))]
    NotPartition(Vec<String>),

    #[error("graph has {n} vertices, above the exact vertex-cover bound {bound} (raise it with --bound)")]
    CoverBound { n: usize, bound: usize },

    #[error("search space too large: {choice_points} undetermined item placements exceed the limit of {limit}")]
    ChoiceLimit { choice_points: usize, limit: usize },

    #[error("search space too large: {states} dynamic-programming states exceed the limit of {limit}")]
    StateLimit { states: usize, limit: usize },

    #[error("time limit of {limit:?} exceeded after processing {done} of {total} agents")]
    TimeLimit { limit: Duration, done: usize, total: usize },

    #[error("allocation is not in normal form: {0}")]
    NotNormalForm(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures caused by resource limits rather than malformed input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::ChoiceLimit { .. } | Error::StateLimit { .. } | Error::TimeLimit { .. } | Error::CoverBound { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
