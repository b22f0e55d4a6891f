use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] tscp_core::Error),
    #[error(transparent)]
    Theory(#[from] tscp_theory::TheoryError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("unknown method: {0}")]
    UnknownMethod(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("insufficient history: {0}")]
    InsufficientHistory(String),
    #[error("causality violation: {0}")]
    Causality(String),
    #[error("no rows")]
    NoRows,
    #[error("missing column: {0}")]
    MissingColumn(String),
    #[error("plot: {0}")]
    Plot(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
