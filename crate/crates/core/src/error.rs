use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid identity space: {0}")]
    InvalidSpace(String),

    #[error("agent {agent} has {found} identity coordinates, space has {expected} dimensions")]
    DimensionMismatch {
        agent: usize,
        expected: usize,
        found: usize,
    },

    #[error("agent ids must be dense 0..n, found id {found} at position {position}")]
    NonDenseIds { position: usize, found: usize },

    #[error("agent {0} cannot be paired with itself")]
    SelfPair(usize),

    #[error("no agent with id {0}")]
    UnknownAgent(usize),

    #[error("pair ({0}, {1}) is not eligible for friendship")]
    Ineligible(usize, usize),

    #[error("ratio undefined: offline mean is zero")]
    UndefinedRatio,

    #[error("cannot summarize an empty trial list")]
    NoTrials,

    #[error("trials mix scenario cells: {0}")]
    MixedTrials(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("malformed input {path}: {message}")]
    Malformed { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
