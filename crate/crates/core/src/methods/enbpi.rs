use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::check_alpha;
use crate::dataset::SeriesDataset;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::metrics::RunResult;
use crate::models::{fit_bootstrap_ensemble, fit_ensemble_on_samples, EnsembleMember, RegressorSpec};
use crate::quantile::{order_statistic, quantile_sorted, sort_scores};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnbpiConfig {
    /// Number of bootstrap models.
    pub b: usize,
    /// Residuals are refreshed after every `batch_size` revealed targets.
    pub batch_size: usize,
    /// Centers are the mean of the leave-out predictions instead of their
    /// `1 - α` quantile.
    pub v2: bool,
}

impl Default for EnbpiConfig {
    fn default() -> Self {
        Self {
            b: 30,
            batch_size: 1,
            v2: true,
        }
    }
}

/// Bootstrap models fit once on the first `t0` points, with the leave-out
/// structure needed to build residuals and centers.
#[derive(Debug, Clone)]
pub struct EnbpiEnsemble {
    members: Vec<EnsembleMember>,
    /// For each training index with at least one leave-out model, that index
    /// and the members that did not see it.
    leave_out: Vec<(usize, Vec<usize>)>,
}

impl EnbpiEnsemble {
    pub fn fit(spec: &RegressorSpec, data: &SeriesDataset, b: usize, seed: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidParameter("B must be >= 1".into()));
        }
        let (x, y) = data.select(&(0..data.t0()).collect::<Vec<_>>());
        Self::from_members(fit_bootstrap_ensemble(spec, x.view(), y.view(), b, seed)?, data.t0())
    }

    /// Same as [`EnbpiEnsemble::fit`] with the resampled index sets given.
    pub fn from_samples(
        spec: &RegressorSpec,
        data: &SeriesDataset,
        samples: Vec<Vec<usize>>,
        seed: u64,
    ) -> Result<Self> {
        let (x, y) = data.select(&(0..data.t0()).collect::<Vec<_>>());
        Self::from_members(fit_ensemble_on_samples(spec, x.view(), y.view(), samples, seed)?, data.t0())
    }

    fn from_members(members: Vec<EnsembleMember>, n: usize) -> Result<Self> {
        let leave_out: Vec<(usize, Vec<usize>)> = (0..n)
            .filter_map(|i| {
                let outs: Vec<usize> = (0..members.len()).filter(|&k| !members[k].contains(i)).collect();
                (!outs.is_empty()).then_some((i, outs))
            })
            .collect();
        if leave_out.is_empty() {
            return Err(Error::DegenerateBootstrap);
        }
        Ok(Self { members, leave_out })
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn fingerprints(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.model.fingerprint()).collect()
    }

    /// Leave-out aggregated predictions `f_{-i}(x)` for every usable training index.
    fn leave_out_predictions(&self, per_model: &[f64]) -> Vec<f64> {
        self.leave_out
            .iter()
            .map(|(_, outs)| outs.iter().map(|&k| per_model[k]).sum::<f64>() / outs.len() as f64)
            .collect()
    }

    /// Center of the interval at `x` given the per-model predictions there.
    pub fn center(&self, per_model: &[f64], alpha: f64, v2: bool) -> f64 {
        let mut loo = self.leave_out_predictions(per_model);
        if v2 {
            loo.iter().sum::<f64>() / loo.len() as f64
        } else {
            order_statistic(&mut loo, 1.0 - alpha)
        }
    }

    /// Emits intervals for the test horizon of `data`. Models are never refit.
    pub fn run(&self, data: &SeriesDataset, alpha: f64, batch_size: usize, v2: bool) -> Result<RunResult> {
        check_alpha(alpha)?;
        if batch_size == 0 {
            return Err(Error::InvalidParameter("batch size must be >= 1".into()));
        }
        let predict_all = |i: usize| -> Vec<f64> {
            self.members.iter().map(|m| m.model.predict(data.row(i))).collect()
        };
        let mut residuals: VecDeque<f64> = self
            .leave_out
            .iter()
            .map(|(i, outs)| {
                let f = outs
                    .iter()
                    .map(|&k| self.members[k].model.predict(data.row(*i)))
                    .sum::<f64>()
                    / outs.len() as f64;
                (data.target(*i) - f).abs()
            })
            .collect();

        let t0 = data.t0();
        let mut intervals = Vec::with_capacity(data.t1());
        let mut centers = Vec::with_capacity(data.t1());
        let mut targets = Vec::with_capacity(data.t1());
        for t in t0..data.len() {
            let center = self.center(&predict_all(t), alpha, v2);
            let sorted = sort_scores(residuals.iter().copied().collect());
            intervals.push(Interval::centered(center, quantile_sorted(&sorted, 1.0 - alpha)));
            centers.push(center);
            targets.push(data.target(t));
            let revealed = t + 1 - t0;
            if revealed % batch_size == 0 {
                for j in (t + 1 - batch_size)..=t {
                    let k = j - t0;
                    residuals.pop_front();
                    residuals.push_back((targets[k] - centers[k]).abs());
                }
            }
        }
        Ok(RunResult::new(alpha, intervals, centers, targets, None))
    }
}

/// EnbPI (or its mean-aggregated V2 variant with `cfg.v2`).
pub fn enbpi(
    spec: &RegressorSpec,
    data: &SeriesDataset,
    alpha: f64,
    cfg: &EnbpiConfig,
    seed: u64,
) -> Result<RunResult> {
    check_alpha(alpha)?;
    EnbpiEnsemble::fit(spec, data, cfg.b, seed)?.run(data, alpha, cfg.batch_size, cfg.v2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1, Array2};

    fn toy(t0: usize, t1: usize) -> SeriesDataset {
        let n = t0 + t1;
        let x = Array2::from_shape_fn((n, 1), |(i, _)| (i % 7) as f64);
        let y = Array1::from_shape_fn(n, |i| (i % 7) as f64 + ((i * 13) % 5) as f64 * 0.3);
        SeriesDataset::new(x, y, t0, t1).unwrap()
    }

    #[test]
    fn full_sample_only_is_degenerate() {
        let d = toy(10, 3);
        let r = EnbpiEnsemble::from_samples(&RegressorSpec::ridge(0.0), &d, vec![(0..10).collect()], 0);
        assert_eq!(r.unwrap_err(), Error::DegenerateBootstrap);
    }

    #[test]
    fn v2_center_is_the_mean_of_leave_out_predictions() {
        // Index 0 is only left out by model 0, index 1 only by model 1.
        let x = array![[0.0], [1.0], [2.0]];
        let d = SeriesDataset::new(x, array![0.0, 1.0, 2.0], 2, 1).unwrap();
        let ens = EnbpiEnsemble::from_samples(&RegressorSpec::ridge(0.0), &d, vec![vec![1, 1], vec![0, 0]], 0).unwrap();
        assert_eq!(ens.center(&[2.0, 4.0], 0.1, true), 3.0);
        assert_eq!(ens.center(&[2.0, 4.0], 0.1, false), 4.0);
    }

    #[test]
    fn points_seen_by_every_model_are_dropped() {
        let d = toy(6, 2);
        let ens = EnbpiEnsemble::from_samples(
            &RegressorSpec::ridge(0.0),
            &d,
            vec![vec![0, 1, 2, 3, 4, 5], vec![0, 0, 1, 1, 2, 5]],
            0,
        )
        .unwrap();
        let kept: Vec<usize> = ens.leave_out.iter().map(|(i, _)| *i).collect();
        assert_eq!(kept, vec![3, 4]);
    }

    #[test]
    fn residual_window_slides_by_batches() {
        let d = toy(40, 12);
        let spec = RegressorSpec::ridge(0.1);
        let ens = EnbpiEnsemble::fit(&spec, &d, 10, 3).unwrap();
        let before = ens.fingerprints();
        let one = ens.run(&d, 0.1, 1, true).unwrap();
        let four = ens.run(&d, 0.1, 4, true).unwrap();
        // The first batch is identical: no residual has been replaced yet.
        assert_eq!(one.intervals[0], four.intervals[0]);
        assert!((four.intervals[0].length() - four.intervals[3].length()).abs() < 1e-9);
        assert_eq!(ens.fingerprints(), before);
        assert_eq!(one.point_forecasts, four.point_forecasts);
    }

    #[test]
    fn deterministic_per_seed() {
        let d = toy(40, 10);
        let spec = RegressorSpec::bagged_trees(5);
        let cfg = EnbpiConfig { b: 8, ..Default::default() };
        assert_eq!(enbpi(&spec, &d, 0.1, &cfg, 1).unwrap(), enbpi(&spec, &d, 0.1, &cfg, 1).unwrap());
    }
}
