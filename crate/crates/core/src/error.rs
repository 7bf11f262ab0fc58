use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("document {doc_id} has sentences without constituency trees; use extract_shallow for POS-only input")]
    MissingTrees { doc_id: String },

    #[error("document {doc_id}, sentence {sent_idx}, token {token_idx} has no POS tag")]
    MissingPos {
        doc_id: String,
        sent_idx: usize,
        token_idx: usize,
    },

    #[error("label pool exhausted for label {label}: {reason}")]
    LabelPoolExhausted { label: String, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("missing {artifact} artifact at {}; run the `{stage}` stage first", path.display())]
    MissingArtifact {
        artifact: &'static str,
        path: PathBuf,
        stage: &'static str,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Stable short name of the error class, used in machine-readable CLI output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::MissingTrees { .. } => "missing_trees",
            Error::MissingPos { .. } => "missing_pos",
            Error::LabelPoolExhausted { .. } => "label_pool_exhausted",
            Error::Config(_) => "config",
            Error::MissingArtifact { .. } => "missing_artifact",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit code: 2 config, 3 data, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } => 4,
            _ => 3,
        }
    }
}
