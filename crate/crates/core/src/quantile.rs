//! Empirical quantiles with the conformal order-statistic rule.
//!
//! The `p`-quantile of `n` values is the `⌈p·n⌉`-th smallest one. Products
//! `p·n` within `1e-9` of an integer are snapped to it so that levels such as
//! `0.9 · 20 / 19 · 19` select the 18th order statistic and not the 19th.

use crate::error::{Error, Result};

const SNAP: f64 = 1e-9;

/// 1-based rank `⌈x⌉` with snapping of near-integers.
pub(crate) fn ceil_rank(x: f64) -> usize {
    let r = x.round();
    let c = if (x - r).abs() <= SNAP { r } else { x.ceil() };
    c.max(0.0) as usize
}

/// `p`-quantile of finite nonnegative scores.
///
/// Clamping conventions: `p >= 1` gives `+inf` (the interval is the whole
/// line) and `p <= 0` gives `0` (the interval collapses on the prediction).
pub fn empirical_quantile(scores: &[f64], p: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::NoCalibrationScores);
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite() || **s < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scores must be finite and nonnegative, got {bad}"
        )));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, p))
}

/// Same as [`empirical_quantile`] on already sorted, validated scores.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    if p >= 1.0 {
        f64::INFINITY
    } else if p <= 0.0 {
        0.0
    } else {
        let k = ceil_rank(p * sorted.len() as f64).clamp(1, sorted.len());
        sorted[k - 1]
    }
}

/// Split-conformal radius: the `⌈(1-α)(n+1)⌉`-th smallest score, i.e. the
/// quantile at the corrected level `(1-α)(1+1/n)`. Infinite when that rank
/// exceeds `n`.
pub fn corrected_quantile_sorted(sorted: &[f64], alpha: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    let k = ceil_rank((1.0 - alpha) * (n + 1) as f64);
    if k > n {
        f64::INFINITY
    } else if k == 0 {
        0.0
    } else {
        sorted[k - 1]
    }
}

/// Order-statistic quantile of arbitrary finite values, `p` in `(0, 1]`.
pub(crate) fn order_statistic(values: &mut [f64], p: f64) -> f64 {
    debug_assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let k = ceil_rank(p * values.len() as f64).clamp(1, values.len());
    values[k - 1]
}

pub(crate) fn sort_scores(mut scores: Vec<f64>) -> Vec<f64> {
    scores.sort_by(f64::total_cmp);
    scores
}
