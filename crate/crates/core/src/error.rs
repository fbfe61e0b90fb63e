use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge list contains no usable edges")]
    EmptyGraph,

    #[error("self-loop on node {0} is not a valid edge")]
    SelfLoop(u64),

    #[error("stream is empty")]
    EmptyStream,

    #[error("probability {name} = {value} must lie in [{min}, 1]")]
    InvalidProbability {
        name: &'static str,
        value: f64,
        min: f64,
    },

    #[error("triangle closure is only defined for undirected streams")]
    DirectedTriangleClosure,

    #[error("{0} is not supported on directed streams")]
    UnsupportedDirected(&'static str),

    #[error("{0} is undefined: wedge estimate is zero")]
    Undefined(&'static str),

    #[error("variance must be non-negative, got {0}")]
    NegativeVariance(f64),

    #[error("stream has {len} edges; outcome enumeration is limited to {max}")]
    StreamTooLarge { len: usize, max: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that originate in reading or writing files, including
    /// malformed input data.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_)
                | Error::Read { .. }
                | Error::Json(_)
                | Error::Parse { .. }
                | Error::EmptyGraph
        )
    }
}
