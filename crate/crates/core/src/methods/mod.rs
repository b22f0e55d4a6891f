//! Conformal procedures: split conformal, its online sequential variant,
//! adaptive conformal inference and EnbPI.

mod aci;
mod enbpi;
mod online;

pub use aci::{aci, aci_error_bound_check, run_aci, AciState};
pub use enbpi::{enbpi, EnbpiConfig, EnbpiEnsemble};
pub use online::{online_steps, osscp, osscp_from_steps, scp, split_window, OnlineStep};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    /// Oldest points train the model, newest ones calibrate it.
    Sequential,
    /// A fresh random permutation of the window at every refit.
    Randomized,
}

/// How a window of past points is divided into proper training and calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPolicy {
    pub kind: SplitKind,
    pub train_fraction: f64,
}

impl Default for SplitPolicy {
    fn default() -> Self {
        Self::sequential(0.5)
    }
}

impl SplitPolicy {
    pub fn sequential(train_fraction: f64) -> Self {
        Self {
            kind: SplitKind::Sequential,
            train_fraction,
        }
    }

    pub fn randomized(train_fraction: f64) -> Self {
        Self {
            kind: SplitKind::Randomized,
            train_fraction,
        }
    }

    /// Training-set size for a window of `len` points.
    pub fn train_size(&self, len: usize) -> Result<usize> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "train_fraction must be in (0, 1), got {}",
                self.train_fraction
            )));
        }
        let n = (len as f64 * self.train_fraction).round() as usize;
        if n == 0 || n >= len {
            return Err(Error::InvalidParameter(format!(
                "a window of {len} points cannot hold both a training and a calibration set"
            )));
        }
        Ok(n)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must be in (0, 1), got {alpha}")))
    }
}
