use std::path::PathBuf;

use thiserror::Error;

use crate::types::Modality;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown token run {span:?} at word {position}")]
    UnknownToken { span: String, position: usize },

    #[error("dimension mismatch: expected {expected}, found {found} (point {index})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        index: usize,
    },

    #[error("modality {0} has no percept feature space")]
    NotPerceptual(Modality),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical failure in {modality} component {component}: {reason}")]
    Numerical {
        modality: Modality,
        component: usize,
        reason: String,
    },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user-supplied configuration.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::NotPerceptual(_))
    }
}
