use std::path::PathBuf;

/// Errors produced by dataset handling, training, and model persistence.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A malformed line in a libsvm-format input.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The input mixes more than two distinct label values.
    #[error("unsupported problem: {0}")]
    UnsupportedProblem(String),

    /// The input contained no examples.
    #[error("empty dataset")]
    EmptyDataset,

    /// A configuration value outside its legal range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A malformed model file.
    #[error("model file {path}: {message}")]
    ModelFormat { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
