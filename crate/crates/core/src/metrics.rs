//! Run outputs and the validity / efficiency metrics computed on them.

use serde::{Deserialize, Serialize};

use crate::interval::Interval;

/// Output of one conformal run over the test horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Target miscoverage rate the run was configured with.
    pub alpha: f64,
    pub intervals: Vec<Interval>,
    pub covered: Vec<bool>,
    /// Effective levels `α_t` used at each step (ACI-type methods only).
    pub alphas: Option<Vec<f64>>,
    pub point_forecasts: Vec<f64>,
    pub targets: Vec<f64>,
}

impl RunResult {
    pub fn new(
        alpha: f64,
        intervals: Vec<Interval>,
        point_forecasts: Vec<f64>,
        targets: Vec<f64>,
        alphas: Option<Vec<f64>>,
    ) -> Self {
        assert_eq!(intervals.len(), targets.len());
        assert_eq!(point_forecasts.len(), targets.len());
        if let Some(a) = &alphas {
            assert_eq!(a.len(), targets.len());
        }
        let covered = intervals
            .iter()
            .zip(&targets)
            .map(|(iv, y)| iv.contains(*y))
            .collect();
        Self {
            alpha,
            intervals,
            covered,
            alphas,
            point_forecasts,
            targets,
        }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.intervals.iter().map(Interval::length).collect()
    }

    /// Largest absolute test residual `|ε|_max`.
    pub fn max_abs_residual(&self) -> f64 {
        self.targets
            .iter()
            .zip(&self.point_forecasts)
            .map(|(y, m)| (y - m).abs())
            .fold(0.0, f64::max)
    }
}

/// Fraction of covered test points.
pub fn coverage(result: &RunResult) -> f64 {
    assert!(!result.is_empty(), "coverage of an empty run");
    result.covered.iter().filter(|c| **c).count() as f64 / result.len() as f64
}

/// Fraction of miscovered test points.
pub fn miss_rate(result: &RunResult) -> f64 {
    1.0 - coverage(result)
}

/// Median of a list of lengths where `+inf` entries take part as `+inf`.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty list");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        let (a, b) = (v[n / 2 - 1], v[n / 2]);
        if b == f64::INFINITY {
            f64::INFINITY
        } else {
            0.5 * (a + b)
        }
    }
}

pub fn median_length(result: &RunResult) -> f64 {
    median(&result.lengths())
}

/// Fraction of intervals with an infinite bound.
pub fn infinite_rate(result: &RunResult) -> f64 {
    assert!(!result.is_empty(), "infinite rate of an empty run");
    result.intervals.iter().filter(|iv| iv.is_infinite()).count() as f64 / result.len() as f64
}

/// Clips each bound to `mu_hat ± eps_max` when it lies beyond it.
pub fn impute_interval(iv: Interval, mu_hat: f64, eps_max: f64) -> Interval {
    debug_assert!(eps_max.is_finite() && eps_max >= 0.0);
    let hi = mu_hat + eps_max;
    let lo = mu_hat - eps_max;
    // Projecting both bounds on the band keeps intervals that miss it valid.
    Interval::new(iv.lower().clamp(lo, hi), iv.upper().clamp(lo, hi))
}

/// How infinite (or over-wide) intervals are accounted for in average lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImputationRule {
    /// Clip both bounds at `μ̂ ± |ε|_max`, `|ε|_max` the largest test residual.
    #[default]
    TestResidualMax,
    /// Replace only infinite lengths by `2 |ε|_max`.
    TwiceOverallMax,
}

pub fn imputed_lengths(result: &RunResult, rule: ImputationRule) -> Vec<f64> {
    let eps_max = result.max_abs_residual();
    match rule {
        ImputationRule::TestResidualMax => result
            .intervals
            .iter()
            .zip(&result.point_forecasts)
            .map(|(iv, mu)| impute_interval(*iv, *mu, eps_max).length())
            .collect(),
        ImputationRule::TwiceOverallMax => result
            .intervals
            .iter()
            .map(|iv| {
                if iv.is_infinite() {
                    2.0 * eps_max
                } else {
                    iv.length()
                }
            })
            .collect(),
    }
}

/// Mean interval length after imputation.
pub fn avg_length_imputed(result: &RunResult, rule: ImputationRule) -> f64 {
    let lengths = imputed_lengths(result, rule);
    lengths.iter().sum::<f64>() / lengths.len() as f64
}
