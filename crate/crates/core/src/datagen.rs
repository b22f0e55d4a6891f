//! Synthetic series: the Friedman regression function with ARMA(1,1) noise.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::SeriesDataset;
use crate::error::{Error, Result};
use crate::seed::{self, stream};

pub const DEFAULT_BURN_IN: usize = 1000;

/// Gaussian ARMA(1,1) noise `ε_{t+1} = φ ε_t + ξ_{t+1} + θ ξ_t` scaled so
/// that its stationary variance equals `target_variance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub phi: f64,
    pub theta: f64,
    pub target_variance: f64,
}

impl NoiseSpec {
    pub fn new(phi: f64, theta: f64, target_variance: f64) -> Result<Self> {
        let s = Self {
            phi,
            theta,
            target_variance,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn white(target_variance: f64) -> Self {
        Self {
            phi: 0.0,
            theta: 0.0,
            target_variance,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.phi.abs() >= 1.0 {
            return Err(Error::Nonstationary(self.phi.abs()));
        }
        if self.theta.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!("|theta| = {} must be < 1", self.theta.abs())));
        }
        if self.phi + self.theta == 0.0 && self.phi != 0.0 {
            return Err(Error::InvalidParameter(
                "phi + theta = 0 cancels the AR and MA parts".into(),
            ));
        }
        if !(self.target_variance >= 0.0 && self.target_variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "variance must be finite and >= 0, got {}",
                self.target_variance
            )));
        }
        Ok(())
    }
}

/// Innovation variance `σ²` giving the ARMA(1,1) process a stationary
/// variance `v`: `σ² = v (1 - φ²) / (1 + 2φθ + θ²)`.
pub fn innovation_variance(v: f64, phi: f64, theta: f64) -> Result<f64> {
    if phi.abs() >= 1.0 {
        return Err(Error::Nonstationary(phi.abs()));
    }
    let denom = 1.0 + 2.0 * phi * theta + theta * theta;
    if denom <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "1 + 2 phi theta + theta^2 = {denom} must be > 0"
        )));
    }
    Ok(v * (1.0 - phi * phi) / denom)
}

/// `T` noise values after discarding `burn_in` steps started from zero.
pub fn simulate_noise(spec: &NoiseSpec, t: usize, burn_in: usize, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    let sigma = innovation_variance(spec.target_variance, spec.phi, spec.theta)?.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = seed::rng(seed);
    let (mut eps, mut xi_prev) = (0.0f64, 0.0f64);
    let mut out = Vec::with_capacity(t);
    for i in 0..burn_in + t {
        let xi = sigma * normal.sample(&mut rng);
        eps = spec.phi * eps + xi + spec.theta * xi_prev;
        xi_prev = xi;
        if i >= burn_in {
            out.push(eps);
        }
    }
    Ok(out)
}

/// `10 sin(π x₁x₂) + 20 (x₃ - 0.5)² + 10 x₄ + 5 x₅`; later components are ignored.
pub fn friedman(x: &[f64]) -> f64 {
    assert!(x.len() >= 5, "friedman needs at least 5 components");
    10.0 * (PI * x[0] * x[1]).sin() + 20.0 * (x[2] - 0.5).powi(2) + 10.0 * x[3] + 5.0 * x[4]
}

/// Uniform `[0, 1]` features, Friedman signal plus simulated noise.
pub fn generate_dataset(
    n_features: usize,
    t0: usize,
    t1: usize,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<SeriesDataset> {
    if n_features < 5 {
        return Err(Error::InvalidParameter(format!(
            "at least 5 features are needed, got {n_features}"
        )));
    }
    let n = t0 + t1;
    let mut rng = seed::derived_rng(seed, stream::FEATURES, 0);
    let x = Array2::from_shape_fn((n, n_features), |_| rng.random::<f64>());
    let eps = simulate_noise(noise, n, DEFAULT_BURN_IN, seed::derive(seed, stream::NOISE, 0))?;
    let y = Array1::from_shape_fn(n, |i| {
        friedman(x.row(i).as_slice().expect("standard layout")) + eps[i]
    });
    SeriesDataset::new(x, y, t0, t1)
}

/// Deterministic trend and season `cos(2πt/180) + sin(2πt/180) + t/100`
/// with AR(1) noise (`φ = 0.99`, innovation variance 0.01). The signal is
/// the single feature; the first half of the series is the initial window.
pub fn model1_preset(t: usize, seed: u64) -> Result<SeriesDataset> {
    let signal = Array1::from_shape_fn(t, model1_signal);
    let normal = Normal::new(0.0, 0.1).expect("valid sd");
    let mut rng = seed::derived_rng(seed, stream::NOISE, 0);
    let mut eps = 0.0;
    let mut noise = Vec::with_capacity(t);
    for i in 0..DEFAULT_BURN_IN + t {
        eps = 0.99 * eps + normal.sample(&mut rng);
        if i >= DEFAULT_BURN_IN {
            noise.push(eps);
        }
    }
    let y = Array1::from_shape_fn(t, |i| signal[i] + noise[i]);
    let x = signal.insert_axis(ndarray::Axis(1));
    SeriesDataset::new(x, y, t / 2, t - t / 2)
}

pub fn model1_signal(t: usize) -> f64 {
    let a = 2.0 * PI * t as f64 / 180.0;
    a.cos() + a.sin() + t as f64 / 100.0
}
