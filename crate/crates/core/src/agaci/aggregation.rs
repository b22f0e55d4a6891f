//! Online aggregation of bounded experts under the pinball loss.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ρ_β(y, b)`: `β (y - b)` when `y >= b`, `(1 - β)(b - y)` otherwise.
pub fn pinball_loss(y: f64, b: f64, beta: f64) -> f64 {
    if y >= b {
        beta * (y - b)
    } else {
        (1.0 - beta) * (b - y)
    }
}

/// Derivative of `b ↦ ρ_β(y, b)`.
pub fn pinball_gradient(y: f64, b: f64, beta: f64) -> f64 {
    if y >= b {
        -beta
    } else {
        1.0 - beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    /// Bernstein online aggregation with per-expert adaptive learning rates.
    Boa,
    /// Exponentially weighted average with a fixed learning rate.
    Ewa { eta: f64 },
}

/// Weight state of one aggregation rule over `K` experts.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregator {
    rule: Rule,
    /// BOA: regularized cumulative regrets. EWA: cumulative losses.
    cumulative: Vec<f64>,
    /// BOA: cumulative squared regrets.
    variance: Vec<f64>,
    /// BOA: largest absolute regret seen so far.
    scale: f64,
    weights: Vec<f64>,
}

impl Aggregator {
    pub fn new(rule: Rule, k: usize) -> Self {
        assert!(k >= 1, "need at least one expert");
        Self {
            rule,
            cumulative: vec![0.0; k],
            variance: vec![0.0; k],
            scale: 0.0,
            weights: vec![1.0 / k as f64; k],
        }
    }

    /// Current normalized weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn combine(&self, predictions: &[f64]) -> f64 {
        self.weights.iter().zip(predictions).map(|(w, p)| w * p).sum()
    }

    /// Feeds the experts' losses at one step and recomputes the weights.
    pub fn update(&mut self, losses: &[f64]) -> Result<()> {
        let k = self.weights.len();
        assert_eq!(losses.len(), k);
        if losses.iter().any(|l| !l.is_finite()) {
            return Err(Error::UnboundedExpert);
        }
        match self.rule {
            Rule::Ewa { eta } => {
                for (c, l) in self.cumulative.iter_mut().zip(losses) {
                    *c += l;
                }
                let logits: Vec<f64> = self.cumulative.iter().map(|c| -eta * c).collect();
                self.weights = softmax(&logits);
            }
            Rule::Boa => {
                if k == 1 {
                    return Ok(());
                }
                let mixed: f64 = self.weights.iter().zip(losses).map(|(w, l)| w * l).sum();
                let regrets: Vec<f64> = losses.iter().map(|l| mixed - l).collect();
                self.scale = regrets.iter().fold(self.scale, |m, r| m.max(r.abs()));
                if self.scale == 0.0 {
                    return Ok(());
                }
                let log_k = (k as f64).ln();
                let mut logits = Vec::with_capacity(k);
                for i in 0..k {
                    let r = regrets[i];
                    self.variance[i] += r * r;
                    let eta = if self.variance[i] > 0.0 {
                        (1.0 / (2.0 * self.scale)).min((log_k / self.variance[i]).sqrt())
                    } else {
                        1.0 / (2.0 * self.scale)
                    };
                    self.cumulative[i] += r - eta * r * r;
                    logits.push(eta.ln() + eta * self.cumulative[i]);
                }
                self.weights = softmax(&logits);
            }
        }
        Ok(())
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Weights after feeding the loss rows (one per step, `K` columns) in order.
pub fn aggregate(rule: Rule, losses: &[Vec<f64>], k: usize) -> Result<Vec<f64>> {
    let mut agg = Aggregator::new(rule, k);
    for row in losses {
        agg.update(row)?;
    }
    Ok(agg.weights().to_vec())
}

/// One bound of the aggregated interval: an aggregator fed with pinball
/// losses at level `beta`, linearized around the mixture when
/// `gradient_trick` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundAggregator {
    agg: Aggregator,
    beta: f64,
    gradient_trick: bool,
}

impl BoundAggregator {
    pub fn new(rule: Rule, k: usize, beta: f64, gradient_trick: bool) -> Self {
        Self {
            agg: Aggregator::new(rule, k),
            beta,
            gradient_trick,
        }
    }

    pub fn weights(&self) -> &[f64] {
        self.agg.weights()
    }

    pub fn combine(&self, bounds: &[f64]) -> f64 {
        self.agg.combine(bounds)
    }

    /// Updates weights after `y` is revealed, given the experts' bounds.
    pub fn update(&mut self, bounds: &[f64], y: f64) -> Result<()> {
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::UnboundedExpert);
        }
        let losses: Vec<f64> = if self.gradient_trick {
            let g = pinball_gradient(y, self.agg.combine(bounds), self.beta);
            bounds.iter().map(|b| g * b).collect()
        } else {
            bounds.iter().map(|b| pinball_loss(y, *b, self.beta)).collect()
        };
        self.agg.update(&losses)
    }
}
