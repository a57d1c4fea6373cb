use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The container itself (JSON array, CSV table) could not be read.
    #[error("format error at record {index}: {message}")]
    Format { index: usize, message: String },

    #[error("record {index}: missing mandatory field `{field}`")]
    MissingField { index: usize, field: &'static str },

    #[error("record {index}: invalid value for `{field}`: {message}")]
    InvalidField {
        index: usize,
        field: &'static str,
        message: String,
    },

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no priority mapping for {} term(s): {}", .0.len(), .0.join(", "))]
    UnmappedTerms(Vec<String>),

    #[error("unknown priority level `{0}`")]
    UnknownPriority(String),

    #[error("sample {0} has no label")]
    Unlabeled(usize),

    #[error("non-finite parameters after training step {step}")]
    NonFinite { step: u64 },

    #[error("invalid checkpoint: {0}")]
    Checkpoint(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
