use serde::{Deserialize, Serialize};

/// Closed prediction interval on the extended real line.
///
/// Either bound may be infinite: ACI emits `[-inf, +inf]` whenever its
/// effective level drops to zero or below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    /// Builds an interval, panicking on NaN bounds or `lower > upper`.
    pub fn new(lower: f64, upper: f64) -> Self {
        assert!(
            !lower.is_nan() && !upper.is_nan() && lower <= upper,
            "invalid interval [{lower}, {upper}]"
        );
        Self { lower, upper }
    }

    /// `[center - radius, center + radius]`; an infinite radius gives the whole line.
    pub fn centered(center: f64, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        if radius == f64::INFINITY {
            Self::whole_line()
        } else {
            Self::new(center - radius, center + radius)
        }
    }

    pub fn whole_line() -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_infinite(&self) -> bool {
        self.lower == f64::NEG_INFINITY || self.upper == f64::INFINITY
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    /// Closed-interval membership; an exact hit on a bound counts as covered.
    pub fn contains(&self, y: f64) -> bool {
        self.lower <= y && y <= self.upper
    }
}
