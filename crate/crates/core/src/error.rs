use thiserror::Error;

use crate::protocol::RoundReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no edges")]
    EmptyInput,

    #[error("invalid CSR cache: {0}")]
    InvalidCache(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("graph has {num_vertices} vertices, oracle limit is {limit}")]
    GraphTooLarge { num_vertices: usize, limit: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("protocol error on rank {rank}: {message}")]
    Protocol { rank: usize, message: String },

    #[error("conflict check between two copies of global vertex {gid}")]
    SameVertex { gid: usize },

    #[error("no convergence after {rounds} rounds ({} conflicts left)", last.conflicts)]
    NonConvergence {
        rounds: usize,
        last: Box<RoundReport>,
    },
}
