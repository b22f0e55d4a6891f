//! Ergodic averages over chain paths.

use serde::{Deserialize, Serialize};

use crate::chain::project;
use crate::quantile_fn::QuantileFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthMode {
    /// Mean of `L(α_t) = 2 Q(1 - α_t)` with `Q(1)` used below zero.
    MeanClipped,
    Median,
}

pub fn lengths<Q: QuantileFn + ?Sized>(path: &[f64], q: &Q) -> Vec<f64> {
    path.iter().map(|a| 2.0 * q.at_level(*a)).collect()
}

pub fn estimate_expected_length<Q: QuantileFn + ?Sized>(path: &[f64], q: &Q, mode: LengthMode) -> f64 {
    let l = lengths(path, q);
    match mode {
        LengthMode::MeanClipped => l.iter().sum::<f64>() / l.len() as f64,
        LengthMode::Median => tscp_core::metrics::median(&l),
    }
}

/// Mean length with the control variate `mean(P(α_t)) - α`, whose
/// stationary expectation is zero, weighted by `2 Q'(1 - α)`. Removes the
/// first-order fluctuation of the plain mean.
pub fn control_variate_length<Q: QuantileFn + ?Sized>(path: &[f64], q: &Q, alpha: f64) -> f64 {
    let plain = estimate_expected_length(path, q, LengthMode::MeanClipped);
    let h = 1e-4;
    let slope = (q.quantile(1.0 - alpha + h) - q.quantile(1.0 - alpha - h)) / (2.0 * h);
    let drift = path.iter().map(|a| project(*a)).sum::<f64>() / path.len() as f64 - alpha;
    plain + 2.0 * slope * drift
}

/// Mean and batch-means standard error over `batches` contiguous batches.
pub fn batch_means(values: &[f64], batches: usize) -> (f64, f64) {
    assert!(batches >= 2 && values.len() >= batches);
    let size = values.len() / batches;
    let means: Vec<f64> = values
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
    let overall = values.iter().sum::<f64>() / values.len() as f64;
    (overall, (var / batches as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    /// Mean of `P(α_t) - α`.
    pub m1: f64,
    pub m1_se: f64,
    /// Mean of `(P(α_t) - α)²`.
    pub m2: f64,
    pub m2_se: f64,
    /// Leading-order value `(γ / 2) α (1 - α)`.
    pub m2_predicted: f64,
}

pub fn moment_checks(path: &[f64], alpha: f64, gamma: f64) -> MomentReport {
    let d: Vec<f64> = path.iter().map(|a| project(*a) - alpha).collect();
    let d2: Vec<f64> = d.iter().map(|x| x * x).collect();
    let batches = 50.min(path.len() / 2).max(2);
    let (m1, m1_se) = batch_means(&d, batches);
    let (m2, m2_se) = batch_means(&d2, batches);
    MomentReport {
        m1,
        m1_se,
        m2,
        m2_se,
        m2_predicted: 0.5 * gamma * alpha * (1.0 - alpha),
    }
}

/// Central second difference of `Q` at `p`.
pub fn second_difference<Q: QuantileFn + ?Sized>(q: &Q, p: f64, h: f64) -> f64 {
    (q.quantile(p + h) - 2.0 * q.quantile(p) + q.quantile(p - h)) / (h * h)
}

/// `L₀ + Q''(1 - α) (γ / 2) α (1 - α)` with `L₀ = 2 Q(1 - α)` and `Q''` by
/// central differences with step `1e-4`.
pub fn taylor_prediction<Q: QuantileFn + ?Sized>(q: &Q, alpha: f64, gamma: f64) -> f64 {
    let l0 = 2.0 * q.quantile(1.0 - alpha);
    l0 + second_difference(q, 1.0 - alpha, 1e-4) * 0.5 * gamma * alpha * (1.0 - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantile_fn::{FoldedGaussian, Linear};
    use approx::assert_relative_eq;

    #[test]
    fn constant_chain_has_base_length_and_zero_moments() {
        let q = FoldedGaussian::new(1.0, 5.0);
        let path = vec![0.1; 1000];
        let l0 = 2.0 * q.quantile(0.9);
        assert_relative_eq!(estimate_expected_length(&path, &q, LengthMode::MeanClipped), l0, max_relative = 1e-12);
        assert_relative_eq!(estimate_expected_length(&path, &q, LengthMode::Median), l0, max_relative = 1e-12);
        let m = moment_checks(&path, 0.1, 0.0);
        assert_eq!((m.m1, m.m2), (0.0, 0.0));
    }

    #[test]
    fn taylor_examples() {
        let q = FoldedGaussian::new(1.0, 10.0);
        assert_eq!(taylor_prediction(&q, 0.1, 0.0), 2.0 * q.quantile(0.9));
        let lin = Linear { a: 1.0, b: 3.0 };
        for g in [0.0, 0.01, 0.3] {
            assert_relative_eq!(taylor_prediction(&lin, 0.2, g), 2.0 * lin.quantile(0.8), epsilon = 1e-6);
        }
    }

    #[test]
    fn difference_matches_closed_form() {
        let q = FoldedGaussian::new(1.0, 100.0);
        for p in [0.9, 0.95, 0.99] {
            assert_relative_eq!(second_difference(&q, p, 1e-4), q.second_derivative(p), max_relative = 1e-3);
        }
    }

    #[test]
    fn folded_gaussian_relative_increase() {
        let q = FoldedGaussian::new(1.0, 100.0);
        // alpha = 0.1, gamma = 0.03: 1.59 %.
        let r = taylor_prediction(&q, 0.1, 0.03) / (2.0 * q.quantile(0.9));
        assert_relative_eq!(r, 1.0159, epsilon = 5e-4);
        // alpha = 0.01: Q''(0.99) = z / (4 φ(z)²) with z = Φ⁻¹(0.995).
        let z: f64 = 2.5758293035489004;
        let dens = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let expected = 1.0 + z / (4.0 * dens * dens) * 0.015 * 0.0099 / (2.0 * z);
        let r = taylor_prediction(&q, 0.01, 0.03) / (2.0 * q.quantile(0.99));
        assert_relative_eq!(r, expected, max_relative = 1e-4);
        assert_relative_eq!(r, 1.0888, epsilon = 5e-4);
    }

    #[test]
    fn batch_means_of_iid_values() {
        let v: Vec<f64> = (0..10_000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let (m, se) = batch_means(&v, 50);
        assert_eq!(m, 0.0);
        assert!(se < 1e-12);
    }
}
