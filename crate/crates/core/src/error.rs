//! Error type shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while loading data, validating configuration, or running
/// the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid manifest: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("{path}:{line}: non-numeric cell in column {column}: {value:?}")]
    NonNumericCell {
        path: PathBuf,
        line: usize,
        column: usize,
        value: String,
    },

    #[error("{path}:{line}: invalid label: {message}")]
    InvalidLabel {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("row-count mismatch: {subject} has {found} rows, expected {expected}")]
    RowCountMismatch {
        subject: String,
        expected: usize,
        found: usize,
    },

    #[error("labels not contiguous from 0: {message}")]
    LabelsNotContiguous { message: String },

    #[error("non-finite entry in view {view:?} at row {row}, column {column}")]
    NonFiniteInput {
        view: String,
        row: usize,
        column: usize,
    },

    #[error("negative entry in view {view:?} at row {row}, column {column}; l1 row normalization requires nonnegative data")]
    NegativeEntry {
        view: String,
        row: usize,
        column: usize,
    },

    #[error("view {view:?} is already normalized")]
    AlreadyNormalized { view: String },

    #[error("view {view:?} has a pending normalization; normalize the dataset first")]
    NotNormalized { view: String },

    #[error("view {view:?} has {rows} rows; unit-variance normalization needs at least 2")]
    DegenerateView { view: String, rows: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("length mismatch: {left} labels vs {right} ground-truth entries")]
    LengthMismatch { left: usize, right: usize },

    #[error("K exceeds N (K={k}, N={n})")]
    KExceedsN { k: usize, n: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("non-finite {quantity} at iteration {iteration}")]
    NonFinite {
        iteration: usize,
        quantity: &'static str,
    },
}

impl Error {
    /// Whether this error stems from bad input (as opposed to a failure
    /// encountered mid-computation). CLI front-ends map input errors to a
    /// distinct exit status.
    pub fn is_invalid_input(&self) -> bool {
        !matches!(self, Error::NonFinite { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
