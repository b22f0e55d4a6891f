//! Score quantile functions `Q` on `[0, 1]`.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

/// A nondecreasing, bounded quantile function.
pub trait QuantileFn: Sync {
    /// `Q(p)` for `p` in `[0, 1]`.
    fn quantile(&self, p: f64) -> f64;

    /// `Q(1)`, the bound used when the effective level drops below zero.
    fn sup(&self) -> f64 {
        self.quantile(1.0)
    }

    /// `Q(1 - a)` extended by `Q(1)` for `a < 0` and `Q(0)` for `a > 1`.
    fn at_level(&self, a: f64) -> f64 {
        if a <= 0.0 {
            self.sup()
        } else if a >= 1.0 {
            self.quantile(0.0)
        } else {
            self.quantile(1.0 - a)
        }
    }
}

/// Quantile of `|ε|` for `ε ~ N(0, sd²)`, capped at `cap`:
/// `Q(p) = min(sd Φ⁻¹((1 + p) / 2), cap)` and `Q(1) = cap`.
#[derive(Debug, Clone)]
pub struct FoldedGaussian {
    sd: f64,
    cap: f64,
    normal: Normal,
}

impl FoldedGaussian {
    pub fn new(sd: f64, cap: f64) -> Self {
        assert!(sd > 0.0 && cap > 0.0 && cap.is_finite());
        Self {
            sd,
            cap,
            normal: Normal::standard(),
        }
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn with_cap(&self, cap: f64) -> Self {
        Self::new(self.sd, cap)
    }

    /// Uncapped `Q''(p)` in closed form: `sd z / (4 φ(z)²)` with `z = Φ⁻¹((1 + p) / 2)`.
    pub fn second_derivative(&self, p: f64) -> f64 {
        let z = self.normal.inverse_cdf(0.5 * (1.0 + p));
        let d = self.normal.pdf(z);
        self.sd * z / (4.0 * d * d)
    }

    /// Uncapped `Q'(p) = sd / (2 φ(z))`.
    pub fn derivative(&self, p: f64) -> f64 {
        let z = self.normal.inverse_cdf(0.5 * (1.0 + p));
        self.sd / (2.0 * self.normal.pdf(z))
    }
}

impl QuantileFn for FoldedGaussian {
    fn quantile(&self, p: f64) -> f64 {
        if p >= 1.0 {
            return self.cap;
        }
        if p <= 0.0 {
            return 0.0;
        }
        (self.sd * self.normal.inverse_cdf(0.5 * (1.0 + p))).min(self.cap)
    }

    fn sup(&self) -> f64 {
        self.cap
    }
}

/// `Q(p) = a + b p`.
#[derive(Debug, Clone, Copy)]
pub struct Linear {
    pub a: f64,
    pub b: f64,
}

impl QuantileFn for Linear {
    fn quantile(&self, p: f64) -> f64 {
        self.a + self.b * p.clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn folded_gaussian_values() {
        let q = FoldedGaussian::new(1.0, 10.0);
        assert_relative_eq!(q.quantile(0.95), 1.959963984540054, epsilon = 1e-9);
        assert_relative_eq!(q.quantile(0.9), 1.6448536269514722, epsilon = 1e-9);
        assert_eq!(q.quantile(0.0), 0.0);
        assert_eq!(q.quantile(1.0), 10.0);
        assert_eq!(FoldedGaussian::new(1.0, 1.0).quantile(0.95), 1.0);
        assert_eq!(FoldedGaussian::new(2.0, 10.0).quantile(0.9), 2.0 * q.quantile(0.9));
    }

    #[test]
    fn extended_levels() {
        let q = FoldedGaussian::new(1.0, 4.0);
        assert_eq!(q.at_level(-0.01), 4.0);
        assert_eq!(q.at_level(0.0), 4.0);
        assert_eq!(q.at_level(1.2), 0.0);
        assert_relative_eq!(q.at_level(0.1), q.quantile(0.9));
    }

    #[test]
    fn closed_form_derivatives_match_differences() {
        let q = FoldedGaussian::new(1.3, 100.0);
        let h = 1e-5;
        for p in [0.5, 0.9, 0.99] {
            let d1 = (q.quantile(p + h) - q.quantile(p - h)) / (2.0 * h);
            assert_relative_eq!(q.derivative(p), d1, max_relative = 1e-5);
        }
    }
}
