use std::path::PathBuf;

use crate::linalg::SpdSolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}, column {column}: cannot parse {value:?} as a finite number")]
    NonNumeric { line: usize, column: usize, value: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("label column {0} not found")]
    MissingLabelColumn(String),

    #[error("dataset needs both classes; only found {0}")]
    SingleClass(&'static str),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{class} class has {count} rows, fewer than the {k} folds requested")]
    TooFewForFolds {
        class: &'static str,
        count: usize,
        k: usize,
    },

    #[error("singular system after ridge escalation (ridge {:e}, residual {:e}, {} attempts)", .0.ridge_added, .0.residual_norm, .0.factorization_attempts)]
    Singular(SpdSolveReport),

    #[error("tau = {tau} removes every majority row (max score {max_score})")]
    EmptySubsample { tau: f64, max_score: f64 },

    #[error("both hyperplanes are degenerate (zero normal)")]
    DegenerateModel,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error("every grid point failed on repeat {repeat}, fold {fold}")]
    FoldFailed { repeat: usize, fold: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
