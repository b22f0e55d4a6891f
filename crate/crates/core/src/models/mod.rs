//! Regression models used as the point predictor `μ̂`.

mod ensemble;
mod forest;
mod ridge;
mod tree;

pub use ensemble::{fit_bootstrap_ensemble, fit_ensemble_on_samples, EnsembleMember};
pub use forest::Forest;
pub use ridge::Ridge;
pub use tree::Tree;

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Ridge,
    BaggedTrees,
}

/// Hyperparameters of a regressor plus the seed of its fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorSpec {
    pub kind: ModelKind,
    pub tree_count: usize,
    pub min_leaf: usize,
    /// Features tried at each split; `None` means all of them.
    pub max_features: Option<usize>,
    /// Resample rows per tree.
    pub bootstrap: bool,
    pub ridge_penalty: f64,
    pub seed: u64,
}

impl RegressorSpec {
    pub fn ridge(penalty: f64) -> Self {
        Self {
            kind: ModelKind::Ridge,
            tree_count: 1,
            min_leaf: 1,
            max_features: None,
            bootstrap: false,
            ridge_penalty: penalty,
            seed: 0,
        }
    }

    /// Random-forest style bagged CART: all features, leaves of size 1.
    pub fn bagged_trees(tree_count: usize) -> Self {
        Self {
            kind: ModelKind::BaggedTrees,
            tree_count,
            min_leaf: 1,
            max_features: None,
            bootstrap: true,
            ridge_penalty: 0.0,
            seed: 0,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        match self.kind {
            ModelKind::Ridge => {
                if !(self.ridge_penalty >= 0.0 && self.ridge_penalty.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "ridge penalty must be finite and >= 0, got {}",
                        self.ridge_penalty
                    )));
                }
            }
            ModelKind::BaggedTrees => {
                if self.tree_count == 0 || self.min_leaf == 0 {
                    return Err(Error::InvalidParameter(
                        "tree_count and min_leaf must be >= 1".into(),
                    ));
                }
                if let Some(m) = self.max_features {
                    if m == 0 || m > n_features {
                        return Err(Error::InvalidParameter(format!(
                            "max_features = {m} outside [1, {n_features}]"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Ridge(Ridge),
    Forest(Forest),
}

impl FittedModel {
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> f64 {
        match self {
            FittedModel::Ridge(m) => m.predict(x),
            FittedModel::Forest(m) => m.predict(x),
        }
    }

    pub fn predict_rows(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        x.rows().into_iter().map(|r| self.predict(r)).collect()
    }

    /// Hash of the fitted parameters, used to check that a model was not refit.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::default();
        match self {
            FittedModel::Ridge(m) => m.hash_into(&mut h),
            FittedModel::Forest(m) => m.hash_into(&mut h),
        }
        h.0
    }
}

pub(crate) struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    pub(crate) fn write(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

/// Fits `spec` on `(x, y)`.
pub fn fit(spec: &RegressorSpec, x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> Result<FittedModel> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows vs {} targets",
            x.nrows(),
            y.len()
        )));
    }
    if x.nrows() == 0 {
        return Err(Error::DimensionMismatch("no training rows".into()));
    }
    spec.validate(x.ncols())?;
    Ok(match spec.kind {
        ModelKind::Ridge => FittedModel::Ridge(Ridge::fit(x, y, spec.ridge_penalty)),
        ModelKind::BaggedTrees => FittedModel::Forest(Forest::fit(spec, x, y)),
    })
}
