use serde::{Deserialize, Serialize};

use super::{check_alpha, online_steps, OnlineStep, SplitPolicy};
use crate::dataset::SeriesDataset;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::metrics::{miss_rate, RunResult};
use crate::models::RegressorSpec;
use crate::quantile::{corrected_quantile_sorted, quantile_sorted};

/// Effective miscoverage level driven by `α_{t+1} = α_t + γ(α - err_t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AciState {
    alpha: f64,
    gamma: f64,
    alpha_t: f64,
    history: Vec<(f64, bool)>,
}

impl AciState {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be in [0, 1], got {gamma}"
            )));
        }
        Ok(Self {
            alpha,
            gamma,
            alpha_t: alpha,
            history: Vec::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Current effective level `α_t`.
    pub fn level(&self) -> f64 {
        self.alpha_t
    }

    /// Past `(α_t, miss_t)` pairs.
    pub fn history(&self) -> &[(f64, bool)] {
        &self.history
    }

    /// Records whether the last interval missed and moves to `α_{t+1}`.
    pub fn update(&mut self, miss: bool) -> f64 {
        self.history.push((self.alpha_t, miss));
        let err = if miss { 1.0 } else { 0.0 };
        self.alpha_t += self.gamma * (self.alpha - err);
        self.alpha_t
    }

    /// Radius at the current level: the raw `1 - α_t` quantile, or the
    /// split-conformal corrected one when `finite_sample_correction` is set.
    pub fn radius(&self, sorted_scores: &[f64], finite_sample_correction: bool) -> f64 {
        if finite_sample_correction {
            corrected_quantile_sorted(sorted_scores, self.alpha_t)
        } else {
            quantile_sorted(sorted_scores, 1.0 - self.alpha_t)
        }
    }
}

/// Runs the ACI recursion over precomputed online steps.
///
/// Panics if a run with `γ > 0` breaks `|miss rate - α| <= 2 / (γ T)`, which
/// holds deterministically.
pub fn run_aci(
    steps: &[OnlineStep],
    alpha: f64,
    gamma: f64,
    finite_sample_correction: bool,
) -> Result<RunResult> {
    let mut state = AciState::new(alpha, gamma)?;
    let mut intervals = Vec::with_capacity(steps.len());
    let mut alphas = Vec::with_capacity(steps.len());
    for s in steps {
        let iv = Interval::centered(s.forecast, state.radius(&s.scores, finite_sample_correction));
        alphas.push(state.level());
        state.update(!iv.contains(s.target));
        intervals.push(iv);
    }
    let result = RunResult::new(
        alpha,
        intervals,
        steps.iter().map(|s| s.forecast).collect(),
        steps.iter().map(|s| s.target).collect(),
        Some(alphas),
    );
    if gamma > 0.0 && !result.is_empty() {
        assert!(
            aci_error_bound_check(&result, gamma)?,
            "ACI error bound violated: miss rate {} for alpha {alpha}, gamma {gamma}",
            miss_rate(&result)
        );
    }
    Ok(result)
}

/// Adaptive conformal inference on a sequential split refit every
/// `refit_every` steps.
pub fn aci(
    spec: &RegressorSpec,
    data: &SeriesDataset,
    alpha: f64,
    gamma: f64,
    refit_every: usize,
    seed: u64,
) -> Result<RunResult> {
    AciState::new(alpha, gamma)?;
    let steps = online_steps(spec, data, &SplitPolicy::default(), refit_every, seed)?;
    run_aci(&steps, alpha, gamma, false)
}

/// Whether `|mean miss - α| <= 2 / (γ T)`.
pub fn aci_error_bound_check(result: &RunResult, gamma: f64) -> Result<bool> {
    if gamma <= 0.0 {
        return Err(Error::BoundUndefined);
    }
    let t = result.len() as f64;
    Ok((miss_rate(result) - result.alpha).abs() <= 2.0 / (gamma * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::methods::osscp_from_steps;
    use proptest::prelude::*;

    #[test]
    fn recursion_examples() {
        let mut s = AciState::new(0.1, 0.05).unwrap();
        assert!((s.update(true) - 0.055).abs() < 1e-12);
        let mut s = AciState::new(0.1, 0.05).unwrap();
        assert!((s.update(false) - 0.105).abs() < 1e-12);
    }

    fn fake_run(misses: usize, t: usize) -> RunResult {
        let intervals = vec![Interval::new(-1.0, 1.0); t];
        let targets = (0..t).map(|i| if i < misses { 5.0 } else { 0.0 }).collect();
        RunResult::new(0.1, intervals, vec![0.0; t], targets, None)
    }

    #[test]
    fn bound_check_examples() {
        assert!(aci_error_bound_check(&fake_run(120, 1000), 0.05).unwrap());
        assert!(!aci_error_bound_check(&fake_run(200, 1000), 0.05).unwrap());
        assert_eq!(aci_error_bound_check(&fake_run(1, 10), 0.0), Err(Error::BoundUndefined));
    }

    fn steps_from(scores: Vec<f64>, residuals: &[f64]) -> Vec<OnlineStep> {
        residuals
            .iter()
            .map(|r| OnlineStep {
                scores: scores.clone(),
                forecast: 0.0,
                target: *r,
                latest_index_used: 0,
                model_fingerprint: 0,
            })
            .collect()
    }

    #[test]
    fn zero_gamma_with_correction_is_osscp() {
        let scores: Vec<f64> = (1..=19).map(f64::from).collect();
        let steps = steps_from(scores, &[3.0, 25.0, -18.5, 7.0, 19.0]);
        let a = run_aci(&steps, 0.1, 0.0, true).unwrap();
        let o = osscp_from_steps(&steps, 0.1).unwrap();
        assert_eq!(a.intervals, o.intervals);
        assert!(a.alphas.unwrap().iter().all(|x| *x == 0.1));
    }

    #[test]
    fn level_below_zero_gives_the_whole_line() {
        let steps = steps_from(vec![1.0, 2.0], &[10.0, 10.0, 10.0, 0.0]);
        // The first miss drops alpha_t to 0.1 - 0.5 * 0.9 = -0.35.
        let r = run_aci(&steps, 0.1, 0.5, false).unwrap();
        assert!(!r.intervals[0].is_infinite());
        assert!(r.intervals[1].is_infinite());
        assert!((r.alphas.unwrap()[1] + 0.35).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn bound_holds_on_random_runs(
            gamma in 0.001f64..1.0,
            alpha in 0.01f64..0.5,
            residuals in prop::collection::vec(-5.0f64..5.0, 1..300),
            scores in prop::collection::vec(0.0f64..4.0, 1..30),
        ) {
            let mut scores = scores;
            scores.sort_by(f64::total_cmp);
            let r = run_aci(&steps_from(scores, &residuals), alpha, gamma, false).unwrap();
            prop_assert!(aci_error_bound_check(&r, gamma).unwrap());
            let alphas = r.alphas.unwrap();
            for w in alphas.windows(2) {
                let d = w[1] - w[0];
                prop_assert!((d - gamma * alpha).abs() < 1e-9 || (d - gamma * (alpha - 1.0)).abs() < 1e-9);
            }
            for a in alphas {
                prop_assert!(a > gamma * (alpha - 1.0) - 1e-12 && a < 1.0 + gamma * alpha + 1e-12);
            }
        }

        #[test]
        fn radius_shrinks_with_level(
            scores in prop::collection::vec(0.0f64..10.0, 1..50),
            a in -0.2f64..1.2, b in -0.2f64..1.2,
        ) {
            let mut scores = scores;
            scores.sort_by(f64::total_cmp);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let mut s_lo = AciState::new(0.5, 0.0).unwrap();
            s_lo.alpha_t = lo;
            let mut s_hi = s_lo.clone();
            s_hi.alpha_t = hi;
            prop_assert!(s_hi.radius(&scores, false) <= s_lo.radius(&scores, false));
        }

        #[test]
        fn a_miss_never_shrinks_the_next_radius(
            scores in prop::collection::vec(0.0f64..10.0, 1..50),
            gamma in 0.001f64..1.0,
        ) {
            let mut scores = scores;
            scores.sort_by(f64::total_cmp);
            let mut s = AciState::new(0.1, gamma).unwrap();
            let before = s.radius(&scores, false);
            s.update(true);
            prop_assert!(s.radius(&scores, false) >= before);
        }
    }
}
