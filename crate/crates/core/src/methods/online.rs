use rand::seq::SliceRandom;

use super::{SplitKind, SplitPolicy};
use crate::dataset::SeriesDataset;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::metrics::RunResult;
use crate::models::{fit, FittedModel, RegressorSpec};
use crate::quantile::{corrected_quantile_sorted, sort_scores};
use crate::seed::{self, stream};

/// Splits the window `[start, start + len)` into (train, calibration) indices.
/// Both lists are returned in ascending order.
pub fn split_window(
    policy: &SplitPolicy,
    start: usize,
    len: usize,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n_train = policy.train_size(len)?;
    let mut positions: Vec<usize> = (0..len).collect();
    if policy.kind == SplitKind::Randomized {
        positions.shuffle(&mut seed::rng(seed));
    }
    let mut train: Vec<usize> = positions[..n_train].iter().map(|p| start + p).collect();
    let mut cal: Vec<usize> = positions[n_train..].iter().map(|p| start + p).collect();
    train.sort_unstable();
    cal.sort_unstable();
    Ok((train, cal))
}

/// What the online engine knows when predicting one test point.
#[derive(Debug, Clone)]
pub struct OnlineStep {
    /// Absolute calibration residuals, sorted ascending.
    pub scores: Vec<f64>,
    pub forecast: f64,
    pub target: f64,
    /// Largest data index read to build this step (features or targets).
    pub latest_index_used: usize,
    pub model_fingerprint: u64,
}

struct Fit {
    model: FittedModel,
    train: Vec<usize>,
    cal_offsets: Vec<usize>,
    window_start: usize,
}

/// Runs the sliding-window protocol: for test index `i = t0 + j` the window
/// is `[i - t0, i)`, the model is refit every `refit_every` steps and the
/// calibration residuals are recomputed at every step with the current model.
pub fn online_steps(
    spec: &RegressorSpec,
    data: &SeriesDataset,
    policy: &SplitPolicy,
    refit_every: usize,
    seed: u64,
) -> Result<Vec<OnlineStep>> {
    if refit_every == 0 {
        return Err(Error::InvalidParameter("refit_every must be >= 1".into()));
    }
    let t0 = data.t0();
    let mut current: Option<Fit> = None;
    let mut steps = Vec::with_capacity(data.t1());
    for j in 0..data.t1() {
        let i = t0 + j;
        let start = i - t0;
        if j % refit_every == 0 {
            let (train, cal) = split_window(policy, start, t0, seed::derive(seed, stream::SPLIT, j as u64))?;
            let (x, y) = data.select(&train);
            let model = fit(&spec.with_seed(seed::derive(seed, stream::MODEL, j as u64)), x.view(), y.view())?;
            current = Some(Fit {
                model,
                cal_offsets: cal.iter().map(|c| c - start).collect(),
                train,
                window_start: start,
            });
        }
        let f = current.as_ref().expect("fit at step 0");
        debug_assert!(f.window_start <= start);
        let cal: Vec<usize> = f
            .cal_offsets
            .iter()
            .map(|o| start + o)
            .filter(|c| f.train.binary_search(c).is_err())
            .collect();
        if cal.is_empty() {
            return Err(Error::NoCalibrationScores);
        }
        let scores = sort_scores(
            cal.iter()
                .map(|&c| (data.target(c) - f.model.predict(data.row(c))).abs())
                .collect(),
        );
        let latest = cal.iter().chain(&f.train).copied().max().expect("nonempty");
        steps.push(OnlineStep {
            scores,
            forecast: f.model.predict(data.row(i)),
            target: data.target(i),
            latest_index_used: latest,
            model_fingerprint: f.model.fingerprint(),
        });
    }
    Ok(steps)
}

fn check_scp_alpha(alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must be in [0, 1), got {alpha}")))
    }
}

/// Offline split conformal prediction: one split of the first `t0` points,
/// one model, one corrected quantile for the whole test horizon.
pub fn scp(
    spec: &RegressorSpec,
    data: &SeriesDataset,
    alpha: f64,
    policy: &SplitPolicy,
    seed: u64,
) -> Result<RunResult> {
    check_scp_alpha(alpha)?;
    let (train, cal) = split_window(policy, 0, data.t0(), seed::derive(seed, stream::SPLIT, 0))?;
    let (x, y) = data.select(&train);
    let model = fit(&spec.with_seed(seed::derive(seed, stream::MODEL, 0)), x.view(), y.view())?;
    let scores = sort_scores(
        cal.iter()
            .map(|&c| (data.target(c) - model.predict(data.row(c))).abs())
            .collect(),
    );
    let radius = corrected_quantile_sorted(&scores, alpha);
    let t0 = data.t0();
    let forecasts: Vec<f64> = (t0..data.len()).map(|i| model.predict(data.row(i))).collect();
    let targets: Vec<f64> = (t0..data.len()).map(|i| data.target(i)).collect();
    let intervals = forecasts.iter().map(|m| Interval::centered(*m, radius)).collect();
    Ok(RunResult::new(alpha, intervals, forecasts, targets, None))
}

/// Split conformal intervals from precomputed online steps.
pub fn osscp_from_steps(steps: &[OnlineStep], alpha: f64) -> Result<RunResult> {
    check_scp_alpha(alpha)?;
    let intervals = steps
        .iter()
        .map(|s| Interval::centered(s.forecast, corrected_quantile_sorted(&s.scores, alpha)))
        .collect();
    Ok(RunResult::new(
        alpha,
        intervals,
        steps.iter().map(|s| s.forecast).collect(),
        steps.iter().map(|s| s.target).collect(),
        None,
    ))
}

/// Online sequential split conformal prediction.
pub fn osscp(
    spec: &RegressorSpec,
    data: &SeriesDataset,
    alpha: f64,
    policy: &SplitPolicy,
    refit_every: usize,
    seed: u64,
) -> Result<RunResult> {
    check_scp_alpha(alpha)?;
    let steps = online_steps(spec, data, policy, refit_every, seed)?;
    osscp_from_steps(&steps, alpha)
}
