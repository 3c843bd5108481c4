use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty set: {0}")]
    EmptySet(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The request is well formed but beyond what the exact machinery can
    /// answer (search limits, windows too small for the decomposition).
    #[error("capability: {0}")]
    Capability(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A zero doubled deviation, i.e. three t-th powers in arithmetic
    /// progression. Impossible for t >= 3, but never assumed.
    #[error("exact 3-AP of t-th powers found: {a}^{t} + {b}^{t} = 2*{n}^{t}")]
    ExactProgression { t: u32, a: u64, b: u64, n: String },

    /// A result failed its own exact re-verification.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capability(_) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
