use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = ReviewError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ReviewError {
    #[error("not found: {0}")]
    NotFound(String),

    #[error("span {start}..{end} overlaps {existing:?} in sentence `{sentence_id}`")]
    OverlapConflict {
        sentence_id: String,
        start: usize,
        end: usize,
        existing: (usize, usize),
    },

    #[error("edit is based on version {based_on} but the state is at version {current}")]
    StaleVersion { based_on: u64, current: u64 },

    #[error(transparent)]
    Invalid(#[from] oncoextract::Error),

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("{path} line {line}: {message}")]
    CorruptLog { path: PathBuf, line: usize, message: String },
}

impl ReviewError {
    pub(crate) fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        ReviewError::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }

    /// Short machine-readable name used in HTTP error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            ReviewError::NotFound(_) => "not_found",
            ReviewError::OverlapConflict { .. } => "overlap_conflict",
            ReviewError::StaleVersion { .. } => "stale_version",
            ReviewError::Invalid(_) => "invalid",
            ReviewError::Io { .. } => "io",
            ReviewError::CorruptLog { .. } => "corrupt_log",
        }
    }
}
