use thiserror::Error;

/// Errors raised by the conformal procedures and their building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no calibration scores")]
    NoCalibrationScores,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("nonstationary: |phi| = {0} must be < 1")]
    Nonstationary(f64),
    #[error("bound undefined: gamma must be > 0")]
    BoundUndefined,
    #[error("degenerate bootstrap: no training point has a leave-out model")]
    DegenerateBootstrap,
    #[error("unbounded expert: loss is not finite")]
    UnboundedExpert,
}

pub type Result<T> = std::result::Result<T, Error>;
