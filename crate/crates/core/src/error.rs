use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate post id {0:?}")]
    DuplicateId(String),

    #[error("line {line}: unknown label {label:?} (expected \"pos\" or \"neg\")")]
    UnknownLabel { line: usize, label: String },

    #[error("class {class} has {count} posts, fewer than the {k} folds requested")]
    TooFewExamples {
        class: &'static str,
        count: usize,
        k: usize,
    },

    #[error("line {line}: expected {expected} vector components, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("malformed embedding header: {0}")]
    MalformedHeader(String),

    #[error("post {post_id:?}: {message}")]
    InvalidTree { post_id: String, message: String },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("non-finite feature value at row {row}, index {index}")]
    NonFiniteFeature { row: usize, index: usize },

    #[error("dimension mismatch: model expects {expected}, input has {found}")]
    VectorDimension { expected: usize, found: usize },

    #[error("cannot fit {k} clusters to {points} points")]
    TooFewPoints { k: usize, points: usize },

    #[error("training corpus contains a single class; information gain is undefined")]
    SingleClass,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Bundle(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
