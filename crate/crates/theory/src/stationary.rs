//! Exact stationary law of the exchangeable chain on its finite lattice.

use num_rational::Ratio;

use crate::chain::{project, Lattice};

/// Stationary distribution over the lattice states, in increasing order.
#[derive(Debug, Clone)]
pub struct Stationary {
    pub states: Vec<f64>,
    pub probs: Vec<f64>,
}

impl Stationary {
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.states.iter().zip(&self.probs).map(|(a, p)| p * f(*a)).sum()
    }
}

/// Solves `π = π P` by lazy power iteration, starting from a point mass at `α`.
///
/// From `a`, the chain moves up by `γα` with probability `1 - P(a)` and down
/// by `γ(1 - α)` with probability `P(a)`.
pub fn exchangeable_stationary(alpha: Ratio<u64>, gamma: f64, tol: f64, max_iter: usize) -> Stationary {
    assert!(gamma > 0.0, "the chain is constant for gamma = 0");
    let lattice = Lattice::new(alpha, gamma);
    let states = lattice.states();
    let n = states.len();
    let (p, q) = (*alpha.numer(), *alpha.denom());
    let up = ((gamma * p as f64 / q as f64) / lattice.spacing).round() as usize;
    let down = ((gamma * (q - p) as f64 / q as f64) / lattice.spacing).round() as usize;
    let miss: Vec<f64> = states.iter().map(|a| project(*a)).collect();

    let start = states
        .iter()
        .enumerate()
        .min_by(|x, y| (x.1 - lattice.alpha).abs().total_cmp(&(y.1 - lattice.alpha).abs()))
        .map(|(i, _)| i)
        .expect("nonempty lattice");
    let mut pi = vec![0.0; n];
    pi[start] = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..max_iter {
        next.iter_mut().zip(&pi).for_each(|(x, p)| *x = 0.5 * p);
        for i in 0..n {
            let m = 0.5 * pi[i];
            if m == 0.0 {
                continue;
            }
            next[(i + up).min(n - 1)] += m * (1.0 - miss[i]);
            next[i.saturating_sub(down)] += m * miss[i];
        }
        let diff: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if diff < tol {
            break;
        }
    }
    Stationary { states, probs: pi }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_sums_to_one_and_mean_level_is_alpha() {
        let s = exchangeable_stationary(Ratio::new(1, 10), 0.05, 1e-14, 200_000);
        assert!((s.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        // Stationarity of the drift: E[P(α)] = α.
        assert!((s.expect(project) - 0.1).abs() < 1e-9);
    }

    #[test]
    fn half_level_is_symmetric() {
        let s = exchangeable_stationary(Ratio::new(1, 2), 0.1, 1e-15, 200_000);
        let m = s.expect(|a| a);
        assert!((m - 0.5).abs() < 1e-9, "{m}");
    }
}
