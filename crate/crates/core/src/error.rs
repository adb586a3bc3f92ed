use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("phase undefined for a zero reflection coefficient")]
    UndefinedPhase,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("framing error: {0}")]
    Framing(String),
    #[error("no frame start passed the sync threshold (best metric {best_metric:.3}, threshold {threshold:.3})")]
    SyncNotFound { best_metric: f64, threshold: f64 },
    #[error("pilot spectrum has a zero bin at index {0}")]
    DegeneratePilot(usize),
    #[error("channel response is singular at bin {0}")]
    SingularChannel(usize),
    #[error("interpolation error: {0}")]
    Interpolation(String),
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("stream header inconsistent: {0}")]
    Header(String),
    #[error("reception failed at frame {frame}: {source}")]
    PartialOutput {
        frame: usize,
        /// Payload bits recovered from the frames before the failure.
        recovered_bits: Vec<u8>,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
