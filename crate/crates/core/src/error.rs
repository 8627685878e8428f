use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown emotion label `{0}`")]
    UnknownEmotionLabel(String),

    #[error("clip `{clip_id}` is missing from {source_name}")]
    MissingClip {
        clip_id: String,
        source_name: String,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("all labels are equal; at least one sample of each class is required")]
    DegenerateLabels,

    #[error("training set contains a single class")]
    SingleClassTraining,

    #[error("test set contains a single class; ROC-AUC is undefined")]
    SingleClassTest,

    #[error("too few samples: need at least {needed}, have {available}")]
    TooFewSamples { needed: usize, available: usize },

    #[error("{}:{line}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: u64,
        message: String,
    },

    #[error("clip `{clip_id}`: visual track has {found} frames, manifest says {expected}")]
    LengthMismatch {
        clip_id: String,
        expected: usize,
        found: usize,
    },

    #[error("{classifier}: trial {trial}, fold {fold}: {source}")]
    Evaluation {
        classifier: String,
        trial: usize,
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid transition chain: {0}")]
    InvalidChain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(file: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
