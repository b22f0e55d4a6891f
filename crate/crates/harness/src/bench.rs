//! Synthetic benchmark over (method × noise × repetition).

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tscp_core::datagen::generate_dataset;
use tscp_core::seed::{derive, stream};

use crate::config::{ExperimentConfig, NoiseCell};
use crate::error::{HarnessError, Result};
use crate::runner::{run_methods, Metrics, RunSettings};

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub phi: f64,
    pub theta: f64,
    pub variance: f64,
    pub rep: usize,
    pub coverage: f64,
    pub median_length: f64,
    pub avg_length_imputed: f64,
    pub pct_infinite: f64,
}

/// Mean and standard error of each metric over repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub phi: f64,
    pub theta: f64,
    pub variance: f64,
    pub n: usize,
    pub coverage: f64,
    pub coverage_se: f64,
    pub median_length: f64,
    pub median_length_se: f64,
    pub avg_length_imputed: f64,
    pub avg_length_imputed_se: f64,
    pub pct_infinite: f64,
    pub pct_infinite_se: f64,
}

/// Sample mean and `σ̂/√n` (zero for a single value).
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    assert!(!values.is_empty(), "mean of no values");
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn settings(cfg: &ExperimentConfig) -> RunSettings {
    RunSettings {
        refit_every: cfg.refit_every,
        train_fraction: cfg.train_fraction,
        enbpi_models: cfg.enbpi_models,
        naive_warmup: cfg.naive_warmup,
        ..RunSettings::new(cfg.alpha)
    }
}

/// Seed of repetition `rep`. Shared by every noise cell, so cells are
/// compared on the same features and innovations.
pub fn rep_seed(base: u64, rep: usize) -> u64 {
    derive(base, stream::REPETITION, rep as u64)
}

pub fn run_rep(cfg: &ExperimentConfig, cell: &NoiseCell, rep: usize) -> Result<Vec<ResultRow>> {
    let methods = cfg.parsed_methods()?;
    let seed = rep_seed(cfg.seed, rep);
    let data = generate_dataset(cfg.n_features, cfg.t0, cfg.t1, &cell.spec()?, seed)?;
    let runs = run_methods(&methods, &cfg.model.spec(), &data, &settings(cfg), seed)?;
    Ok(runs
        .iter()
        .map(|(m, r)| {
            let x = Metrics::of(r);
            ResultRow {
                method: m.to_string(),
                phi: cell.phi,
                theta: cell.theta,
                variance: cell.variance,
                rep,
                coverage: x.coverage,
                median_length: x.median_length,
                avg_length_imputed: x.avg_length_imputed,
                pct_infinite: x.pct_infinite,
            }
        })
        .collect())
}

/// Runs every (noise cell, repetition) in parallel. Rows come out ordered by
/// cell, then repetition, then method, whatever the number of workers.
pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.noise.len())
        .flat_map(|c| (0..cfg.repetitions).map(move |r| (c, r)))
        .collect();
    let per_job: Vec<Vec<ResultRow>> = jobs
        .par_iter()
        .map(|&(c, r)| run_rep(cfg, &cfg.noise[c], r))
        .collect::<Result<_>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

/// Aggregates rows by (method, φ, θ, variance), in order of first appearance.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, f64, f64, f64)> = Vec::new();
    for r in rows {
        let k = (r.method.clone(), r.phi, r.theta, r.variance);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(method, phi, theta, variance)| {
            let group: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| r.method == method && r.phi == phi && r.theta == theta && r.variance == variance)
                .collect();
            let stat = |f: fn(&ResultRow) -> f64| mean_se(&group.iter().map(|r| f(r)).collect::<Vec<_>>());
            let (coverage, coverage_se) = stat(|r| r.coverage);
            let (median_length, median_length_se) = stat(|r| r.median_length);
            let (avg_length_imputed, avg_length_imputed_se) = stat(|r| r.avg_length_imputed);
            let (pct_infinite, pct_infinite_se) = stat(|r| r.pct_infinite);
            SummaryRow {
                method,
                phi,
                theta,
                variance,
                n: group.len(),
                coverage,
                coverage_se,
                median_length,
                median_length_se,
                avg_length_imputed,
                avg_length_imputed_se,
                pct_infinite,
                pct_infinite_se,
            }
        })
        .collect()
}

pub fn write_rows<T: Serialize, W: Write>(rows: &[T], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_results<R: Read>(r: R) -> Result<Vec<ResultRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(HarnessError::from)
}

/// Writes `results.csv` and `summary.csv` into `dir`.
pub fn write_outputs(rows: &[ResultRow], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_rows(rows, std::fs::File::create(dir.join("results.csv"))?)?;
    write_rows(&summarize(rows), std::fs::File::create(dir.join("summary.csv"))?)?;
    Ok(())
}
