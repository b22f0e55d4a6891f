//! Numerical laboratory for the stationary behaviour of adaptive conformal
//! inference: the effective-level chain under exchangeable and AR(1)
//! residuals, its exact stationary law, moment checks, the small-γ length
//! expansion and learning-rate sweeps.

pub mod chain;
pub mod estimate;
pub mod quantile_fn;
pub mod stationary;
pub mod sweep;

pub use chain::{chain_run_ar1, chain_step_exchangeable, run_exchangeable, ChainConfig, Lattice};
pub use estimate::{
    control_variate_length, estimate_expected_length, moment_checks, taylor_prediction, LengthMode, MomentReport,
};
pub use quantile_fn::{FoldedGaussian, Linear, QuantileFn};
pub use stationary::{exchangeable_stationary, Stationary};
pub use sweep::{sweep_gamma, SweepConfig, SweepRow, SweepTable};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TheoryError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("io: {0}")]
    Io(String),
}
