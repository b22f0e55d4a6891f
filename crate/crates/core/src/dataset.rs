//! Time-ordered regression data with a train/calibration horizon and a test horizon.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Features and targets in time order. Row `i` is time `i`; the first `t0`
/// rows form the initial train+calibration window and the last `t1` rows are
/// predicted one at a time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDataset {
    features: Array2<f64>,
    targets: Array1<f64>,
    t0: usize,
    t1: usize,
}

impl SeriesDataset {
    pub fn new(features: Array2<f64>, targets: Array1<f64>, t0: usize, t1: usize) -> Result<Self> {
        if features.nrows() != targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows vs {} targets",
                features.nrows(),
                targets.len()
            )));
        }
        if t0 + t1 != targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "t0 + t1 = {} but the series has {} rows",
                t0 + t1,
                targets.len()
            )));
        }
        if features.ncols() == 0 {
            return Err(Error::DimensionMismatch("no feature columns".into()));
        }
        Ok(Self {
            features,
            targets,
            t0,
            t1,
        })
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn targets(&self) -> ArrayView1<'_, f64> {
        self.targets.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn target(&self, i: usize) -> f64 {
        self.targets[i]
    }

    pub fn t0(&self) -> usize {
        self.t0
    }

    pub fn t1(&self) -> usize {
        self.t1
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// Copies the rows at `idx` (in the given order, repeats allowed).
    pub fn select(&self, idx: &[usize]) -> (Array2<f64>, Array1<f64>) {
        (
            self.features.select(Axis(0), idx),
            self.targets.select(Axis(0), idx),
        )
    }

    /// Same data with a different test horizon start; `t0 + t1` is unchanged.
    pub fn with_horizon(&self, t0: usize) -> Result<Self> {
        Self::new(
            self.features.clone(),
            self.targets.clone(),
            t0,
            self.len().checked_sub(t0).ok_or_else(|| {
                Error::InvalidParameter(format!("t0 = {t0} exceeds series length"))
            })?,
        )
    }

    /// Replaces the targets, keeping features and horizons.
    pub fn with_targets(&self, targets: Array1<f64>) -> Result<Self> {
        Self::new(self.features.clone(), targets, self.t0, self.t1)
    }
}
