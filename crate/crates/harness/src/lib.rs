//! Experiment runner for conformal prediction on time series: synthetic
//! benchmarks, learning-rate sweeps, the price forecasting pipeline and
//! figure emission.

pub mod bench;
pub mod config;
pub mod error;
pub mod lab;
pub mod plot;
pub mod price;
pub mod registry;
pub mod runner;

pub use bench::{run_benchmark, summarize, ResultRow, SummaryRow};
pub use config::{ExperimentConfig, ModelConfig, NoiseCell};
pub use error::{HarnessError, Result};
pub use plot::{emit_plot, render, PlotKind, PlotOptions, Table};
pub use price::{run_price_pipeline, standin_records, PriceConfig, PriceOutput, PriceRecord};
pub use registry::Method;
pub use runner::{run_methods, Metrics, RunSettings};
