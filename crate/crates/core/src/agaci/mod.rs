//! Parameter-free ACI: online aggregation of ACI experts run with different
//! learning rates, and the naive "best past γ" selector.

mod aggregation;
mod naive;

pub use aggregation::{aggregate, pinball_gradient, pinball_loss, Aggregator, BoundAggregator, Rule};
pub use naive::{naive_select, select_from, NaiveSelectorState};

use serde::{Deserialize, Serialize};

use crate::dataset::SeriesDataset;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::methods::{check_alpha, online_steps, AciState, OnlineStep, SplitPolicy};
use crate::metrics::RunResult;
use crate::models::RegressorSpec;

/// Values substituted for infinite expert bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Thresholds {
    /// `μ̂ ± factor · (largest calibration residual)` at the current step.
    CalibrationMax { factor: f64 },
    Fixed { lower: f64, upper: f64 },
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds::CalibrationMax { factor: 2.0 }
    }
}

impl Thresholds {
    fn at(&self, step: &OnlineStep) -> (f64, f64) {
        match *self {
            Thresholds::CalibrationMax { factor } => {
                let m = factor * step.scores.last().copied().unwrap_or(0.0);
                (step.forecast - m, step.forecast + m)
            }
            Thresholds::Fixed { lower, upper } => (lower, upper),
        }
    }
}

/// 29 geometric values from `1e-6` to `0.3`, plus `0`.
pub fn default_gamma_grid() -> Vec<f64> {
    let (lo, hi, n) = (1e-6f64, 0.3f64, 29);
    let step = (hi / lo).ln() / (n - 1) as f64;
    let mut grid = vec![0.0];
    grid.extend((0..n).map(|i| (lo.ln() + step * i as f64).exp()));
    *grid.last_mut().expect("nonempty") = hi;
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgaciConfig {
    pub gammas: Vec<f64>,
    pub rule: Rule,
    pub gradient_trick: bool,
    pub thresholds: Thresholds,
    /// Experts use the split-conformal corrected quantile instead of the raw one.
    pub finite_sample_correction: bool,
}

impl Default for AgaciConfig {
    fn default() -> Self {
        Self {
            gammas: default_gamma_grid(),
            rule: Rule::Boa,
            gradient_trick: true,
            thresholds: Thresholds::default(),
            finite_sample_correction: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AgaciOutput {
    pub result: RunResult,
    /// Steps where the aggregated lower bound exceeded the upper one and the
    /// two were swapped.
    pub crossings: usize,
    /// Per-step weights of the lower and upper aggregations (before the update).
    pub weights_lower: Vec<Vec<f64>>,
    pub weights_upper: Vec<Vec<f64>>,
    /// Thresholded expert bounds per step, `(lower, upper)` per expert.
    pub expert_bounds: Vec<Vec<(f64, f64)>>,
}

fn experts(alpha: f64, gammas: &[f64]) -> Result<Vec<AciState>> {
    if gammas.is_empty() {
        return Err(Error::InvalidParameter("at least one gamma is required".into()));
    }
    gammas.iter().map(|g| AciState::new(alpha, *g)).collect()
}

/// Aggregates ACI experts over precomputed online steps.
pub fn agaci_from_steps(steps: &[OnlineStep], alpha: f64, cfg: &AgaciConfig) -> Result<AgaciOutput> {
    check_alpha(alpha)?;
    let mut states = experts(alpha, &cfg.gammas)?;
    let k = states.len();
    let mut lower = BoundAggregator::new(cfg.rule, k, alpha / 2.0, cfg.gradient_trick);
    let mut upper = BoundAggregator::new(cfg.rule, k, 1.0 - alpha / 2.0, cfg.gradient_trick);

    let mut out = AgaciOutput {
        result: RunResult::new(alpha, vec![], vec![], vec![], None),
        crossings: 0,
        weights_lower: Vec::with_capacity(steps.len()),
        weights_upper: Vec::with_capacity(steps.len()),
        expert_bounds: Vec::with_capacity(steps.len()),
    };
    let mut intervals = Vec::with_capacity(steps.len());
    for step in steps {
        let (m_lo, m_hi) = step.thresholds(&cfg.thresholds)?;
        let mut lows = Vec::with_capacity(k);
        let mut highs = Vec::with_capacity(k);
        for s in states.iter_mut() {
            let iv = Interval::centered(step.forecast, s.radius(&step.scores, cfg.finite_sample_correction));
            lows.push(if iv.lower() == f64::NEG_INFINITY { m_lo } else { iv.lower() });
            highs.push(if iv.upper() == f64::INFINITY { m_hi } else { iv.upper() });
            s.update(!iv.contains(step.target));
        }
        let mut lo = lower.combine(&lows);
        let mut hi = upper.combine(&highs);
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
            out.crossings += 1;
        }
        intervals.push(Interval::new(lo, hi));
        out.weights_lower.push(lower.weights().to_vec());
        out.weights_upper.push(upper.weights().to_vec());
        lower.update(&lows, step.target)?;
        upper.update(&highs, step.target)?;
        out.expert_bounds.push(lows.into_iter().zip(highs).collect());
    }
    out.result = RunResult::new(
        alpha,
        intervals,
        steps.iter().map(|s| s.forecast).collect(),
        steps.iter().map(|s| s.target).collect(),
        None,
    );
    Ok(out)
}

impl OnlineStep {
    fn thresholds(&self, t: &Thresholds) -> Result<(f64, f64)> {
        let (lo, hi) = t.at(self);
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok((lo, hi))
        } else {
            Err(Error::InvalidParameter(format!("thresholds must be finite and ordered, got ({lo}, {hi})")))
        }
    }
}

/// AgACI on a sequential split refit every `refit_every` steps.
pub fn agaci(
    spec: &RegressorSpec,
    data: &SeriesDataset,
    alpha: f64,
    cfg: &AgaciConfig,
    refit_every: usize,
    seed: u64,
) -> Result<AgaciOutput> {
    check_alpha(alpha)?;
    experts(alpha, &cfg.gammas)?;
    let steps = online_steps(spec, data, &SplitPolicy::default(), refit_every, seed)?;
    agaci_from_steps(&steps, alpha, cfg)
}

/// Follows the expert picked by [`naive_select`] at every step. The warm-up
/// expert is the one with the smallest γ.
pub fn naive_from_steps(steps: &[OnlineStep], alpha: f64, gammas: &[f64], warmup: usize) -> Result<RunResult> {
    let mut states = experts(alpha, gammas)?;
    let warmup_expert = gammas
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty");
    let mut selector = NaiveSelectorState::new(states.len(), warmup, warmup_expert);
    let mut intervals = Vec::with_capacity(steps.len());
    for step in steps {
        let ivs: Vec<Interval> = states
            .iter()
            .map(|s| Interval::centered(step.forecast, s.radius(&step.scores, false)))
            .collect();
        intervals.push(ivs[naive_select(&selector, alpha)]);
        for (s, iv) in states.iter_mut().zip(&ivs) {
            s.update(!iv.contains(step.target));
        }
        selector.record(&ivs, step.target);
    }
    Ok(RunResult::new(
        alpha,
        intervals,
        steps.iter().map(|s| s.forecast).collect(),
        steps.iter().map(|s| s.target).collect(),
        None,
    ))
}
