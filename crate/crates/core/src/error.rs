//! Crate-wide error type.
//!
//! One enum covers every failure the library can report; variants are grouped
//! by the kind of contract they break (shapes, configuration, data schema,
//! training, checkpoints, I/O) so callers can match on what went wrong
//! without parsing message strings.

use std::path::PathBuf;

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Every error this crate produces.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix had the wrong length for the operation.
    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    Shape {
        /// Operation or field the mismatch was detected in.
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A configuration value violates its documented range or combination.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A caller-side contract was violated (e.g. empty input, zero epsilon).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A computation produced a non-finite value outside of training.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// An input CSV is missing a column the pipeline requires.
    #[error("schema error in {file}: missing required column `{column}`")]
    MissingColumn { file: String, column: String },

    /// An input CSV has a structural problem other than a missing column.
    #[error("schema error in {file}: {message}")]
    Schema { file: String, message: String },

    /// A data row failed to parse or validate; rows are 1-indexed excluding
    /// the header so the number matches what an editor shows.
    #[error("row {row}: {message}")]
    InvalidRow { row: usize, message: String },

    /// The training loss stopped being finite.
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged { epoch: usize },

    /// A checkpoint was written by an incompatible format version.
    #[error("checkpoint version mismatch: file has version {found}, this build reads version {expected}")]
    CheckpointVersion { found: u64, expected: u64 },

    /// A checkpoint file is not valid JSON or is internally inconsistent.
    #[error("malformed checkpoint: {0}")]
    MalformedCheckpoint(String),

    /// An operating-system I/O failure, tagged with the path involved.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Wraps an [`std::io::Error`] together with the path being accessed.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
