use thiserror::Error;

/// Errors produced by dataset handling, learning, inference and evaluation.
#[derive(Error, Debug)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("column '{column}' required by the schema is missing from the header")]
    MissingColumn { column: String },

    #[error("row {row}, column '{column}': cannot parse '{value}' as a number")]
    BadNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("unknown variable '{0}'")]
    UnknownVariable(String),

    #[error("variable '{0}' is not continuous")]
    NotContinuous(String),

    #[error("variable '{0}' is not categorical")]
    NotCategorical(String),

    #[error("log transform on '{column}': negative value {value} at row {row}")]
    NegativeLogInput {
        column: String,
        row: usize,
        value: f64,
    },

    #[error("period label '{0}' is not present in the age table")]
    UnknownPeriod(String),

    #[error("variable '{0}' has a degenerate range (max == min)")]
    DegenerateRange(String),

    #[error("discretizer needs at least 2 bins, got {0}")]
    TooFewBins(usize),

    #[error("cannot fit discretizer on an empty value list")]
    EmptyValues,

    #[error("graphs are over different node sets and cannot be compared")]
    IncomparableGraphs,

    #[error("edge constraints are inconsistent: {0}")]
    BadConstraints(String),

    #[error("records share no comparable variables")]
    IncomparableRecords,

    #[error("encoded vector has zero norm; cosine distance is undefined")]
    ZeroNorm,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("variable '{0}' has no observed rows; cannot fit its distribution")]
    NoObservedRows(String),

    #[error("imputation target '{0}' is already present in the evidence")]
    TargetEvidenced(String),

    #[error("model file error: {0}")]
    ModelFormat(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
