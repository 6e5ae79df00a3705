use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A problem instance that violates a structural requirement.
    #[error("invalid instance: {field}: {reason}")]
    Instance { field: String, reason: String },

    #[error("agent index {agent} out of range (instance has {n_agents} agents)")]
    AgentOutOfRange { agent: usize, n_agents: usize },

    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Exhaustive routines refuse inputs above their enumeration cap.
    #[error("{what} refuses ground sets larger than {cap} (got {got})")]
    TooLarge {
        what: &'static str,
        cap: usize,
        got: usize,
    },

    #[error("failed to parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_path_to_error::Error<serde_json::Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
}

impl Error {
    pub(crate) fn instance(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Instance {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    /// Whether the error stems from user-supplied configuration rather than
    /// an internal failure.
    pub fn is_configuration(&self) -> bool {
        !matches!(self, Error::Csv { .. } | Error::Empty(_))
    }
}
