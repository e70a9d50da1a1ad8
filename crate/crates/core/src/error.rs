//! Error type shared by every stage of the pipeline.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, PieError>;

/// Broad class of a failure, used by frontends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or inconsistent input.
    Input,
    /// Valid input on which the math has no answer (ties, collinearity, empty kernels).
    Degenerate,
}

#[derive(Debug, Error)]
pub enum PieError {
    #[error("input is empty: {0}")]
    Empty(&'static str),

    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),

    #[error("duplicate feature '{0}' in importance file")]
    DuplicateFeature(String),

    #[error("cannot parse '{value}' as a number at row {row}, column {column} ('{name}')")]
    ParseCell {
        row: usize,
        column: usize,
        name: String,
        value: String,
    },

    #[error("missing value at row {row}, column {column} ('{name}')")]
    MissingCell {
        row: usize,
        column: usize,
        name: String,
    },

    #[error("non-finite value '{value}' at row {row}, column {column} ('{name}')")]
    NonFinite {
        row: usize,
        column: usize,
        name: String,
        value: String,
    },

    #[error("row {row} has {found} fields, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("importance file must have the header 'feature,importance', found '{0}'")]
    BadImportanceHeader(String),

    #[error("features in table but missing from importance: {0:?}")]
    MissingFeatures(Vec<String>),

    #[error("features in importance but absent from table: {0:?}")]
    UnknownFeatures(Vec<String>),

    #[error("column mismatch: expected {expected:?}, found {found:?}")]
    ColumnMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} needs at least {needed}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("negative entry {value} in {what} at index {index}")]
    NegativeInput {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("all importances are equal; no feature ranking is derivable")]
    ConstantImportance,

    #[error("target column is constant")]
    ConstantTarget,

    #[error("constant feature columns: {0:?}")]
    ConstantFeatures(Vec<String>),

    #[error("design matrix is rank deficient (condition estimate {condition:.3e}); offending columns: {columns:?}")]
    RankDeficient {
        condition: f64,
        columns: Vec<String>,
    },

    #[error("degenerate sampling: {0}")]
    DegenerateSampling(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl PieError {
    pub fn class(&self) -> ErrorClass {
        match self {
            PieError::ConstantImportance
            | PieError::ConstantTarget
            | PieError::ConstantFeatures(_)
            | PieError::RankDeficient { .. }
            | PieError::DegenerateSampling(_) => ErrorClass::Degenerate,
            _ => ErrorClass::Input,
        }
    }
}
