//! Conformal prediction intervals for time series.
//!
//! Split conformal prediction (offline and online), adaptive conformal
//! inference, online aggregation of ACI experts (AgACI) and EnbPI, together
//! with the regression models, metrics and synthetic data they are evaluated on.

pub mod agaci;
pub mod datagen;
pub mod dataset;
pub mod error;
pub mod interval;
pub mod methods;
pub mod metrics;
pub mod models;
pub mod quantile;
pub mod seed;

pub use dataset::SeriesDataset;
pub use error::{Error, Result};
pub use interval::Interval;
pub use metrics::RunResult;
