use thiserror::Error;

use crate::enumerate::PartialResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("index out of range: {0}")]
    Range(String),

    #[error("not a perfect matching: {0}")]
    NotMatching(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("inconsistent vertex set: {0}")]
    Inconsistent(String),

    #[error("diagram is disconnected")]
    Disconnected,

    #[error("search budget exceeded after {} completed subtrees", .0.completed.len())]
    BudgetExceeded(Box<PartialResult>),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
