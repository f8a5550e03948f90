//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading data or running exact computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("schema error in {context}: {message}")]
    Schema { context: String, message: String },

    #[error("consistency error in {context}: {message}")]
    Consistency { context: String, message: String },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("unknown label `{label}` in {context}")]
    UnknownLabel { label: String, context: String },

    #[error("incompatible characters: {0}")]
    Incompatible(String),

    #[error("the zero character has no pole order")]
    ZeroCharacter,

    #[error("matrix has unresolved entries: {0}")]
    UnknownEntries(String),

    #[error("label `{0}` is not covered by any block of the context")]
    Coverage(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("empty domain for cell ({row}, {col}): {reason}")]
    EmptyDomain { row: String, col: String, reason: String },

    #[error("domain of cell ({row}, {col}) exceeds the search cap {cap}")]
    SearchCapExceeded { row: String, col: String, cap: u32 },

    #[error("search stopped after {nodes} nodes with {completions} completion(s) found")]
    SearchLimitReached { nodes: usize, completions: usize },
}

impl Error {
    pub(crate) fn schema(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            context: context.into(),
            message: message.into(),
        }
    }

    pub(crate) fn consistency(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Consistency {
            context: context.into(),
            message: message.into(),
        }
    }

    pub(crate) fn unknown_label(label: impl Into<String>, context: impl Into<String>) -> Self {
        Error::UnknownLabel {
            label: label.into(),
            context: context.into(),
        }
    }

    /// True for errors caused by malformed or inconsistent input data.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Schema { .. }
                | Error::Consistency { .. }
                | Error::MissingData(_)
                | Error::UnknownLabel { .. }
                | Error::Coverage(_)
                | Error::EmptyDomain { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
