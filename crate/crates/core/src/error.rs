use std::path::PathBuf;

use crate::entities::{AgentPhase, Role};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid width {0}: must be at least one byte")]
    InvalidWidth(usize),

    #[error("width mismatch: {left} bytes vs {right} bytes")]
    WidthMismatch { left: usize, right: usize },

    #[error("malformed frame: {0}")]
    Framing(String),

    #[error("payload must not be empty")]
    EmptyPayload,

    #[error("ciphertext does not unwrap to a well-framed bundle: {0}")]
    CorruptCiphertext(String),

    #[error("identity {0} is already registered")]
    DuplicateIdentity(String),

    #[error("{role} is in phase {actual}, expected {expected}")]
    OutOfOrder {
        role: Role,
        expected: AgentPhase,
        actual: AgentPhase,
    },

    #[error("unknown principal {0}")]
    UnknownPrincipal(String),

    #[error("no live endpoint for {0}")]
    Routing(Role),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("malformed record payload: {0}")]
    Deserialize(String),

    #[error("genuine detection rate is undefined without genuine users")]
    UndefinedRate,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
