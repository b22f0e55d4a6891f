use ndarray::{ArrayView1, ArrayView2};
use rand::Rng;

use super::{Fnv, RegressorSpec, Tree};
use crate::seed::{self, stream};

/// Average of CART trees, each grown on its own bootstrap resample.
#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
}

impl Forest {
    pub fn fit(spec: &RegressorSpec, x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> Self {
        let (n, d) = x.dim();
        let max_features = spec.max_features.unwrap_or(d).min(d);
        // Without resampling or feature subsampling every tree is the same.
        let count = if !spec.bootstrap && max_features == d {
            1
        } else {
            spec.tree_count
        };
        let all: Vec<usize> = (0..n).collect();
        let trees = (0..count)
            .map(|b| {
                let rows: Vec<usize> = if spec.bootstrap {
                    let mut rng = seed::derived_rng(spec.seed, stream::BOOTSTRAP, b as u64);
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    all.clone()
                };
                let mut rng = seed::derived_rng(spec.seed, stream::FEATURES, b as u64);
                Tree::fit(x, y, &rows, spec.min_leaf, max_features, &mut rng)
            })
            .collect();
        Self { trees }
    }

    pub fn predict(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub(crate) fn hash_into(&self, h: &mut Fnv) {
        for t in &self.trees {
            t.hash_into(h);
        }
    }
}
