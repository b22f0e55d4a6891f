//! Expected interval length of ACI on AR(1) residuals across learning rates.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{aci_on_residuals, ar1_residuals};
use crate::quantile_fn::{FoldedGaussian, QuantileFn};
use crate::TheoryError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub alpha: f64,
    pub gammas: Vec<f64>,
    pub phis: Vec<f64>,
    pub reps: usize,
    pub steps: usize,
    pub burn_in: usize,
    /// Clipping level of the residuals.
    pub clip: f64,
    pub seed: u64,
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

impl SweepConfig {
    /// 40 learning rates in `[0, 0.2]`, `T = 10⁵`, 5 repetitions.
    pub fn desk() -> Self {
        Self {
            alpha: 0.1,
            gammas: linspace(0.0, 0.2, 40),
            phis: vec![0.0, 0.6, 0.85, 0.95, 0.99, 0.997],
            reps: 5,
            steps: 100_000,
            burn_in: 10_000,
            clip: 10.0,
            seed: 0,
        }
    }

    /// 100 learning rates in `[0, 0.2]`, `T = 10⁶`, 25 repetitions.
    pub fn full() -> Self {
        Self {
            gammas: linspace(0.0, 0.2, 100),
            reps: 25,
            steps: 1_000_000,
            ..Self::desk()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi: f64,
    pub gamma: f64,
    pub rep: usize,
    pub mean_length: f64,
    pub median_length: f64,
    pub miss_rate: f64,
    pub pct_infinite: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn phis(&self) -> Vec<f64> {
        let mut v: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !v.contains(&r.phi) {
                v.push(r.phi);
            }
        }
        v
    }

    /// `(γ, mean over repetitions of the mean length)` for one `φ`, in grid order.
    pub fn curve(&self, phi: f64) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64, usize)> = Vec::new();
        for r in self.rows.iter().filter(|r| r.phi == phi) {
            match out.iter_mut().find(|(g, _, _)| *g == r.gamma) {
                Some(e) => {
                    e.1 += r.mean_length;
                    e.2 += 1;
                }
                None => out.push((r.gamma, r.mean_length, 1)),
            }
        }
        out.into_iter().map(|(g, s, n)| (g, s / n as f64)).collect()
    }

    /// Learning rate minimizing the averaged mean length; ties go to the smaller γ.
    pub fn gamma_star(&self, phi: f64) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        for (g, l) in self.curve(phi) {
            let better = match best {
                None => true,
                Some((bg, bl)) => l < bl || (l == bl && g < bg),
            };
            if better {
                best = Some((g, l));
            }
        }
        best.map(|b| b.0)
    }

    /// Per-repetition minimizers `γ*` for one `φ`.
    pub fn gamma_star_per_rep(&self, phi: f64) -> Vec<f64> {
        let reps = self.rows.iter().filter(|r| r.phi == phi).map(|r| r.rep).max().map_or(0, |m| m + 1);
        (0..reps)
            .map(|rep| {
                self.rows
                    .iter()
                    .filter(|r| r.phi == phi && r.rep == rep)
                    .fold((f64::INFINITY, f64::INFINITY), |(bg, bl), r| {
                        if r.mean_length < bl || (r.mean_length == bl && r.gamma < bg) {
                            (r.gamma, r.mean_length)
                        } else {
                            (bg, bl)
                        }
                    })
                    .0
            })
            .collect()
    }

    /// Writes `phi,gamma,rep,mean_length,median_length,miss_rate,pct_infinite`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), TheoryError> {
        let mut wtr = csv::Writer::from_writer(w);
        for r in &self.rows {
            wtr.serialize(r).map_err(|e| TheoryError::Io(e.to_string()))?;
        }
        wtr.flush().map_err(|e| TheoryError::Io(e.to_string()))?;
        Ok(())
    }
}

/// Lengths and rates of one ACI run on a residual path. Infinite intervals
/// are counted with length `2 max |ε|`.
pub fn run_cell<Q: QuantileFn + ?Sized>(residuals: &[f64], alpha: f64, gamma: f64, q: &Q) -> (f64, f64, f64, f64) {
    let (alphas, misses) = aci_on_residuals(residuals, alpha, gamma, q);
    let max_abs = residuals.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let lengths: Vec<f64> = alphas
        .iter()
        .map(|a| if *a <= 0.0 { 2.0 * max_abs } else { 2.0 * q.at_level(*a) })
        .collect();
    let n = lengths.len() as f64;
    let mean = lengths.iter().sum::<f64>() / n;
    let median = tscp_core::metrics::median(&lengths);
    let miss = misses.iter().filter(|m| **m).count() as f64 / n;
    let inf = alphas.iter().filter(|a| **a <= 0.0).count() as f64 / n;
    (mean, median, miss, inf)
}

/// Runs every `(φ, repetition)` cell once and every learning rate on the same
/// residual path, so that curves over γ are compared on common noise.
pub fn sweep_gamma(cfg: &SweepConfig) -> Result<SweepTable, TheoryError> {
    if cfg.gammas.is_empty() || cfg.phis.is_empty() || cfg.reps == 0 || cfg.steps == 0 {
        return Err(TheoryError::InvalidParameter("sweep grids must be nonempty".into()));
    }
    if let Some(p) = cfg.phis.iter().find(|p| !(0.0..1.0).contains(*p)) {
        return Err(TheoryError::InvalidParameter(format!("phi = {p} must be in [0, 1)")));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(TheoryError::InvalidParameter(format!("alpha = {} must be in (0, 1)", cfg.alpha)));
    }
    let q = FoldedGaussian::new(1.0, cfg.clip);
    let cells: Vec<(usize, usize)> = (0..cfg.phis.len())
        .flat_map(|i| (0..cfg.reps).map(move |r| (i, r)))
        .collect();
    let rows: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(i, rep)| {
            let phi = cfg.phis[i];
            let seed = tscp_core::seed::derive(cfg.seed, i as u64, rep as u64);
            let eps = ar1_residuals(phi, cfg.clip, cfg.burn_in + cfg.steps, seed);
            let eps = &eps[cfg.burn_in..];
            cfg.gammas
                .iter()
                .map(|&gamma| {
                    let (mean_length, median_length, miss_rate, pct_infinite) = run_cell(eps, cfg.alpha, gamma, &q);
                    SweepRow {
                        phi,
                        gamma,
                        rep,
                        mean_length,
                        median_length,
                        miss_rate,
                        pct_infinite,
                    }
                })
                .collect()
        })
        .collect();
    Ok(SweepTable {
        rows: rows.into_iter().flatten().collect(),
    })
}
