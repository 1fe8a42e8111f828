use thiserror::Error;

use crate::greedy::RunTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("version space is empty")]
    EmptyVersionSpace,

    #[error("greedy run stalled at value {value} < target {target} with no productive action left")]
    StalledRun {
        value: String,
        target: String,
        trace: Box<RunTrace>,
    },

    #[error("instance too large for exhaustive search: {what} is {got}, limit {limit}")]
    InstanceTooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("ground set of {got} pairs exceeds the exhaustive-check limit of {limit}")]
    GroundSetTooLarge { got: usize, limit: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("malformed edge list at line {line}: {msg}")]
    MalformedEdgeList { line: usize, msg: String },

    #[error("edge list contains no edges")]
    EmptyGraph,

    #[error("could not generate {requested} distinct labelings within {attempts} attempts")]
    PartitionRetryExhausted { requested: usize, attempts: usize },

    #[error("target Q={q} is unreachable: {why}")]
    UnreachableTarget { q: String, why: String },

    #[error("version-space memoization requires a learning objective; {kind} is not one")]
    MemoNotApplicable { kind: &'static str },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}
