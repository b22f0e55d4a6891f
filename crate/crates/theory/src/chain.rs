//! The effective-level Markov chains of ACI under idealized scores.

use num_integer::Integer;
use num_rational::Ratio;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::quantile_fn::QuantileFn;
use crate::TheoryError;

/// Parameters shared by the exchangeable and AR(1) chains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Target level `α = p / q`.
    pub alpha: Ratio<u64>,
    pub gamma: f64,
    /// AR coefficient of the residuals; `None` for exchangeable scores.
    pub phi: Option<f64>,
    /// Clipping level `R` of the AR(1) residuals.
    pub clip: f64,
    pub steps: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl ChainConfig {
    pub fn new(alpha: Ratio<u64>, gamma: f64) -> Self {
        Self {
            alpha,
            gamma,
            phi: None,
            clip: 10.0,
            steps: 100_000,
            burn_in: 10_000,
            seed: 0,
        }
    }

    pub fn alpha_f64(&self) -> f64 {
        *self.alpha.numer() as f64 / *self.alpha.denom() as f64
    }

    pub fn validate(&self) -> Result<(), TheoryError> {
        let (p, q) = (*self.alpha.numer(), *self.alpha.denom());
        if p == 0 || p >= q {
            return Err(TheoryError::InvalidParameter(format!("alpha = {p}/{q} must be in (0, 1)")));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(TheoryError::InvalidParameter(format!("gamma = {} must be >= 0", self.gamma)));
        }
        if let Some(phi) = self.phi {
            if !(0.0..1.0).contains(&phi) {
                return Err(TheoryError::InvalidParameter(format!("phi = {phi} must be in [0, 1)")));
            }
        }
        if !(self.clip > 0.0) {
            return Err(TheoryError::InvalidParameter(format!("clip = {} must be > 0", self.clip)));
        }
        Ok(())
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.alpha, self.gamma)
    }
}

/// Projection of an effective level on `[0, 1]`.
pub fn project(a: f64) -> f64 {
    a.clamp(0.0, 1.0)
}

/// Finite state space `α + (γ g / q) ℤ ∩ (γ(α - 1), 1 + γα)`, `g = gcd(q - p, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub alpha: f64,
    pub spacing: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Lattice {
    pub fn new(alpha: Ratio<u64>, gamma: f64) -> Self {
        let (p, q) = (*alpha.numer(), *alpha.denom());
        let g = (q - p).gcd(&p);
        let a = p as f64 / q as f64;
        Self {
            alpha: a,
            spacing: gamma * g as f64 / q as f64,
            lower: gamma * (a - 1.0),
            upper: 1.0 + gamma * a,
        }
    }

    /// Signed lattice index of `a`, if `a` is within `tol` spacings of a lattice point.
    pub fn index_of(&self, a: f64, tol: f64) -> Option<i64> {
        let k = (a - self.alpha) / self.spacing;
        let r = k.round();
        ((k - r).abs() <= tol).then_some(r as i64)
    }

    pub fn contains(&self, a: f64) -> bool {
        a > self.lower && a < self.upper && self.index_of(a, 1e-6).is_some()
    }

    /// All states in increasing order.
    pub fn states(&self) -> Vec<f64> {
        let k_lo = ((self.lower - self.alpha) / self.spacing).floor() as i64;
        let k_hi = ((self.upper - self.alpha) / self.spacing).ceil() as i64;
        (k_lo..=k_hi)
            .map(|k| self.alpha + k as f64 * self.spacing)
            .filter(|a| *a > self.lower + 1e-12 && *a < self.upper - 1e-12)
            .collect()
    }
}

/// One step of the exchangeable chain: a miss happens with probability `P(α_t)`.
pub fn chain_step_exchangeable<R: Rng>(alpha_t: f64, cfg: &ChainConfig, rng: &mut R) -> f64 {
    let miss = rng.random::<f64>() < project(alpha_t);
    let err = if miss { 1.0 } else { 0.0 };
    alpha_t + cfg.gamma * (cfg.alpha_f64() - err)
}

/// `steps` states of the exchangeable chain started at `α` after `burn_in` steps.
pub fn run_exchangeable(cfg: &ChainConfig) -> Result<Vec<f64>, TheoryError> {
    cfg.validate()?;
    let mut rng = tscp_core::seed::rng(cfg.seed);
    let mut a = cfg.alpha_f64();
    let mut path = Vec::with_capacity(cfg.steps);
    for i in 0..cfg.burn_in + cfg.steps {
        if i >= cfg.burn_in {
            path.push(a);
        }
        a = chain_step_exchangeable(a, cfg, &mut rng);
    }
    Ok(path)
}

/// Clipped AR(1) residuals with unit stationary variance.
pub fn ar1_residuals(phi: f64, clip: f64, n: usize, seed: u64) -> Vec<f64> {
    let sigma = (1.0 - phi * phi).sqrt();
    let mut rng = tscp_core::seed::rng(seed);
    let mut e: f64 = StandardNormal.sample(&mut rng);
    e = e.clamp(-clip, clip);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(e);
        let xi: f64 = StandardNormal.sample(&mut rng);
        e = (phi * e + sigma * xi).clamp(-clip, clip);
    }
    out
}

/// Runs ACI on given residuals: a miss at step `t` is `|ε_t| > Q(1 - P(α_t))`,
/// with an infinite interval (never a miss) when `α_t <= 0`.
/// Returns `(α_t, miss_t)` for every step.
pub fn aci_on_residuals<Q: QuantileFn + ?Sized>(
    residuals: &[f64],
    alpha: f64,
    gamma: f64,
    q: &Q,
) -> (Vec<f64>, Vec<bool>) {
    let mut a = alpha;
    let mut alphas = Vec::with_capacity(residuals.len());
    let mut misses = Vec::with_capacity(residuals.len());
    for e in residuals {
        let miss = a > 0.0 && e.abs() > q.at_level(a);
        alphas.push(a);
        misses.push(miss);
        a += gamma * (alpha - if miss { 1.0 } else { 0.0 });
    }
    (alphas, misses)
}

/// AR(1) chain `(α_t, ε_{t-1})`: clipped AR(1) residuals with `φ = cfg.phi`
/// and unit stationary variance, ACI driven by the quantile `q` of `|ε|`.
/// Returns the `α` path and the residual path after burn-in.
pub fn chain_run_ar1<Q: QuantileFn + ?Sized>(cfg: &ChainConfig, q: &Q) -> Result<(Vec<f64>, Vec<f64>), TheoryError> {
    cfg.validate()?;
    let phi = cfg.phi.unwrap_or(0.0);
    let eps = ar1_residuals(phi, cfg.clip, cfg.burn_in + cfg.steps, cfg.seed);
    let (alphas, _) = aci_on_residuals(&eps, cfg.alpha_f64(), cfg.gamma, q);
    Ok((alphas[cfg.burn_in..].to_vec(), eps[cfg.burn_in..].to_vec()))
}
