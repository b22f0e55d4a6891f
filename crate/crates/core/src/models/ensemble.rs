use ndarray::{ArrayView1, ArrayView2, Axis};
use rand::Rng;

use super::{fit, FittedModel, RegressorSpec};
use crate::error::Result;
use crate::seed::{self, stream};

/// One bootstrap model together with the row multiset it was trained on.
#[derive(Debug, Clone)]
pub struct EnsembleMember {
    pub model: FittedModel,
    /// Resampled row indices, sorted ascending, repeats kept.
    pub sample: Vec<usize>,
}

impl EnsembleMember {
    pub fn contains(&self, row: usize) -> bool {
        self.sample.binary_search(&row).is_ok()
    }
}

/// Draws `b` with-replacement resamples of the `n` rows and fits one model on
/// each. Members are fit without an inner bootstrap.
pub fn fit_bootstrap_ensemble(
    spec: &RegressorSpec,
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    b: usize,
    seed: u64,
) -> Result<Vec<EnsembleMember>> {
    let n = x.nrows();
    let samples = (0..b)
        .map(|k| {
            let mut rng = seed::derived_rng(seed, stream::BOOTSTRAP, k as u64);
            (0..n).map(|_| rng.random_range(0..n)).collect()
        })
        .collect();
    fit_ensemble_on_samples(spec, x, y, samples, seed)
}

/// Fits one member per given row multiset.
pub fn fit_ensemble_on_samples(
    spec: &RegressorSpec,
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    samples: Vec<Vec<usize>>,
    seed: u64,
) -> Result<Vec<EnsembleMember>> {
    samples
        .into_iter()
        .enumerate()
        .map(|(k, mut sample)| {
            sample.sort_unstable();
            let member_spec = RegressorSpec {
                bootstrap: false,
                ..spec.with_seed(seed::derive(seed, stream::MODEL, k as u64))
            };
            let xs = x.select(Axis(0), &sample);
            let ys = y.select(Axis(0), &sample);
            Ok(EnsembleMember {
                model: fit(&member_spec, xs.view(), ys.view())?,
                sample,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{Array1, Array2};

    fn data(n: usize) -> (Array2<f64>, Array1<f64>) {
        let x = Array2::from_shape_fn((n, 2), |(i, j)| ((i * 7 + j * 3) % 11) as f64);
        let y = Array1::from_shape_fn(n, |i| (i % 5) as f64);
        (x, y)
    }

    #[test]
    fn forced_full_sample_trains_on_all_rows() {
        let (x, y) = data(12);
        let spec = RegressorSpec::ridge(0.5);
        let ens = fit_ensemble_on_samples(&spec, x.view(), y.view(), vec![(0..12).collect()], 1).unwrap();
        assert_eq!(ens.len(), 1);
        let direct = fit(&spec, x.view(), y.view()).unwrap();
        assert_eq!(ens[0].model.predict_rows(x.view()), direct.predict_rows(x.view()));
    }

    #[test]
    fn same_seed_same_samples() {
        let (x, y) = data(30);
        let spec = RegressorSpec::ridge(1.0);
        let a = fit_bootstrap_ensemble(&spec, x.view(), y.view(), 5, 42).unwrap();
        let b = fit_bootstrap_ensemble(&spec, x.view(), y.view(), 5, 42).unwrap();
        for (m, n) in a.iter().zip(&b) {
            assert_eq!(m.sample, n.sample);
        }
        let c = fit_bootstrap_ensemble(&spec, x.view(), y.view(), 5, 43).unwrap();
        assert_ne!(a[0].sample, c[0].sample);
    }

    #[test]
    fn distinct_fraction_matches_bootstrap_theory() {
        let (x, y) = data(200);
        let ens = fit_bootstrap_ensemble(&RegressorSpec::ridge(1.0), x.view(), y.view(), 100, 7).unwrap();
        let mean_fraction = ens
            .iter()
            .map(|m| {
                let mut s = m.sample.clone();
                s.dedup();
                s.len() as f64 / 200.0
            })
            .sum::<f64>()
            / 100.0;
        // 1 - (1 - 1/n)^n for n = 200
        let expected = 1.0 - (1.0 - 1.0 / 200.0f64).powi(200);
        assert!((mean_fraction - expected).abs() < 0.02, "{mean_fraction}");
        assert!((mean_fraction - (1.0 - (-1.0f64).exp())).abs() < 0.02);
    }
}
