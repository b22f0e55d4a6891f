//! Length expansion report for the exchangeable chain.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use tscp_theory::{
    control_variate_length, exchangeable_stationary, moment_checks, run_exchangeable, taylor_prediction, ChainConfig,
    FoldedGaussian, QuantileFn,
};

use crate::error::{HarnessError, Result};

/// Exact fraction for a decimal with at most 9 digits after the point.
pub fn decimal_ratio(x: f64) -> Option<Ratio<u64>> {
    let mut den = 1u64;
    while den <= 1_000_000_000 {
        let num = x * den as f64;
        if (num - num.round()).abs() < 1e-6 && num.round() >= 0.0 {
            return Some(Ratio::new(num.round() as u64, den));
        }
        den *= 10;
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub gamma: f64,
    /// Length at γ = 0.
    pub l0: f64,
    /// Simulated `E[L] / L0`.
    pub simulated_ratio: f64,
    /// `E[L] / L0` under the exact stationary law of the chain.
    pub exact_ratio: f64,
    /// Second-order expansion of `E[L] / L0` in γ.
    pub taylor_ratio: f64,
    pub mean_offset: f64,
    pub mean_offset_se: f64,
    pub second_moment: f64,
    pub second_moment_predicted: f64,
}

/// Gaussian scores with the top quantile capped at `cap`.
pub fn theory_report(alpha: f64, gammas: &[f64], steps: usize, cap: f64, seed: u64) -> Result<Vec<TheoryRow>> {
    let a = decimal_ratio(alpha)
        .filter(|r| *r > Ratio::from_integer(0) && *r < Ratio::from_integer(1))
        .ok_or_else(|| HarnessError::Config(format!("alpha {alpha} must be a decimal in (0, 1)")))?;
    let q = FoldedGaussian::new(1.0, cap);
    let l0 = 2.0 * q.quantile(1.0 - alpha);
    gammas
        .iter()
        .enumerate()
        .map(|(k, &gamma)| {
            let cfg = ChainConfig {
                steps,
                seed: seed.wrapping_add(k as u64),
                ..ChainConfig::new(a, gamma)
            };
            let path = run_exchangeable(&cfg)?;
            let m = moment_checks(&path, alpha, gamma);
            let exact = exchangeable_stationary(a, gamma, 1e-14, 2_000_000);
            Ok(TheoryRow {
                gamma,
                l0,
                simulated_ratio: control_variate_length(&path, &q, alpha) / l0,
                exact_ratio: exact.expect(|s| 2.0 * q.at_level(s)) / l0,
                taylor_ratio: taylor_prediction(&q, alpha, gamma) / l0,
                mean_offset: m.m1,
                mean_offset_se: m.m1_se,
                second_moment: m.m2,
                second_moment_predicted: m.m2_predicted,
            })
        })
        .collect()
}
