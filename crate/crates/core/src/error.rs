use thiserror::Error;

pub type Result<T> = std::result::Result<T, GdaError>;

/// Which axis of a labelled matrix an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Row => f.write_str("row"),
            Axis::Column => f.write_str("column"),
        }
    }
}

#[derive(Debug, Error)]
pub enum GdaError {
    #[error("negative or non-finite cell {value} at row {row} ({row_label}), column {col} ({col_label})")]
    InvalidCell {
        row: usize,
        col: usize,
        row_label: String,
        col_label: String,
        value: f64,
    },

    #[error("duplicate {axis} label {label:?}")]
    DuplicateLabel { axis: Axis, label: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("table has zero grand total")]
    EmptyTable,

    #[error("table needs at least 2 rows and 2 columns, got {rows}x{cols}")]
    TooSmall { rows: usize, cols: usize },

    #[error("all-zero {axis}s: {}", labels.join(", "))]
    ZeroLines { axis: Axis, labels: Vec<String> },

    #[error("profile {label:?} has zero total")]
    ZeroProfile { label: String },

    #[error("unknown {kind} {label:?}")]
    UnknownLabel { kind: &'static str, label: String },

    #[error("axis {axis} out of range (model has {available} factors)")]
    AxisOutOfRange { axis: usize, available: usize },

    #[error("factor plane needs at least 2 factors, model has {0}; use a 1-D strip plot instead")]
    NotEnoughFactors(usize),

    #[error("individual {individual:?}, question {question:?}: response index {index} outside {n_categories} categories")]
    ResponseOutOfRange {
        individual: String,
        question: String,
        index: usize,
        n_categories: usize,
    },

    #[error("question {0:?} has fewer than 2 categories")]
    SingleCategory(String),

    #[error("dataset has no principal question")]
    NoPrincipalQuestion,

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("sequence order required for constrained clustering")]
    MissingOrder,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("invalid UTF-8 at byte offset {offset}")]
    Encoding { offset: usize },

    #[error("record {index}: cannot parse timestamp {value:?}")]
    Timestamp { index: usize, value: String },

    #[error("vocabulary is empty after filtering; lower --min-occurrences or relax the stopword classes")]
    EmptyVocabulary,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("unsupported archive version {found:?}, expected {expected:?}")]
    Version { found: String, expected: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl GdaError {
    /// Errors caused by the numbers themselves rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            GdaError::NotEnoughFactors(_) | GdaError::ZeroLines { .. } | GdaError::EmptyTable
        )
    }
}
