use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate vocabulary: only {surviving} stem(s) survive pruning (need at least 2)")]
    DegenerateVocabulary { surviving: usize },

    #[error("corpus too small to split: {sentences} sentence(s), need at least 10")]
    CorpusTooSmall { sentences: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("token index {index} out of range for vocabulary of size {vocab}")]
    IndexOutOfRange { index: usize, vocab: usize },

    #[error("context has {got} tokens, expected {expected}")]
    ContextLength { got: usize, expected: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("diverged: non-finite gradient")]
    Diverged,

    #[error("training diverged at epoch {epoch}, iteration {iteration}")]
    TrainingDiverged { epoch: usize, iteration: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("no scoreable words")]
    NoScoreableWords,

    #[error("invalid model file: {0}")]
    Format(String),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
