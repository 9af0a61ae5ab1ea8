use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing file: {0}")]
    MissingFile(PathBuf),
    #[error("book `{0}` yielded no chapters")]
    EmptyBook(String),
    #[error("{path}: invalid UTF-8 at byte {offset}")]
    Encoding { path: PathBuf, offset: usize },
    #[error("chapter delimiter never matched")]
    NoChaptersFound,
    #[error("chapter {index} is empty after trimming")]
    EmptyChapter { index: usize },
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("invalid corpus: {0}")]
    InvalidCorpus(String),
    #[error("empty input")]
    EmptyInput,
    #[error("every document is empty after preprocessing")]
    AllDocumentsEmpty,
    #[error("document {book}:{chapter} is empty after preprocessing")]
    EmptyDocument { book: String, chapter: u32 },
    #[error("unknown book `{0}`")]
    UnknownBook(String),
    #[error("row {0} has no nonzero entries")]
    ZeroRow(usize),
    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("both vectors are all-zero")]
    BothZero,
    #[error("zero vector")]
    ZeroVector,
    #[error("{measure} distance undefined between rows {left} and {right}: {source}")]
    PairUndefined {
        measure: &'static str,
        left: usize,
        right: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("at least {needed} rows required, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("measure `{0}` has zero variance over pairs")]
    DegenerateMeasure(&'static str),
    #[error("feature vector has length {got}, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("objective became non-finite at step {0}")]
    NonFiniteObjective(usize),
    #[error("cannot split {n} samples into {m} folds")]
    TooManyFolds { n: usize, m: usize },
    #[error("empty hyperparameter grid")]
    EmptyGrid,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
