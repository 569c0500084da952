use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("I/O error: {0}")]
    Stream(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("vocabulary: {0}")]
    Vocabulary(String),
    #[error("unknown type <{0}>")]
    UnknownType(String),
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("class {class:?} has {size} instances, fewer than the cap {cap}")]
    UndersizedClass { class: String, size: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("unknown model version")]
    UnknownModelVersion,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("entity linking: {0}")]
    Service(String),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True when the root cause is an external service failure.
    pub fn is_service(&self) -> bool {
        match self {
            Error::Service(_) => true,
            Error::Stage { source, .. } => source.is_service(),
            _ => false,
        }
    }
}
