use thiserror::Error;

use crate::geometry::SegmentId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty point cloud")]
    EmptyCloud,
    #[error("non-finite coordinate in point cloud")]
    NonFinite,
    #[error("unknown segment id {0}")]
    UnknownSegment(SegmentId),
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("unsatisfiable goal: {0}")]
    UnsatisfiableGoal(String),
    #[error("empty goal")]
    EmptyGoal,
    #[error("unknown predicate {0:?}")]
    UnknownPredicate(String),
    #[error("insufficient elites: need at least 2, got {0}")]
    InsufficientElites(usize),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
