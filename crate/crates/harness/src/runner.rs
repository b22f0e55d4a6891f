//! Runs a list of methods on one dataset, sharing the expensive parts:
//! online fits are computed once for OSSCP, ACI, AgACI and the naive
//! selector, and one bootstrap ensemble serves both EnbPI variants.

use tscp_core::agaci::{agaci_from_steps, naive_from_steps, AgaciConfig};
use tscp_core::methods::{
    online_steps, osscp_from_steps, run_aci, scp, EnbpiEnsemble, OnlineStep, SplitPolicy,
};
use tscp_core::metrics::{avg_length_imputed, coverage, infinite_rate, median_length, ImputationRule};
use tscp_core::models::RegressorSpec;
use tscp_core::seed::{derive, stream};
use tscp_core::{RunResult, SeriesDataset};

use crate::error::{HarnessError, Result};
use crate::registry::Method;

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub alpha: f64,
    pub refit_every: usize,
    pub train_fraction: f64,
    pub enbpi_models: usize,
    pub naive_warmup: usize,
    pub agaci: AgaciConfig,
}

impl RunSettings {
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            refit_every: 1,
            train_fraction: 0.5,
            enbpi_models: 30,
            naive_warmup: 50,
            agaci: AgaciConfig::default(),
        }
    }
}

/// Per-run summary statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub coverage: f64,
    pub median_length: f64,
    pub avg_length_imputed: f64,
    /// Percentage of intervals with an infinite bound.
    pub pct_infinite: f64,
}

impl Metrics {
    pub fn of(result: &RunResult) -> Self {
        Self {
            coverage: coverage(result),
            median_length: median_length(result),
            avg_length_imputed: avg_length_imputed(result, ImputationRule::default()),
            pct_infinite: 100.0 * infinite_rate(result),
        }
    }
}

/// Fails if a step read data at or after the point it predicts.
pub fn check_causality(steps: &[OnlineStep], t0: usize) -> Result<()> {
    for (j, s) in steps.iter().enumerate() {
        if s.latest_index_used >= t0 + j {
            return Err(HarnessError::Causality(format!(
                "step {j} used index {} while predicting index {}",
                s.latest_index_used,
                t0 + j
            )));
        }
    }
    Ok(())
}

pub fn run_methods(
    methods: &[Method],
    spec: &RegressorSpec,
    data: &SeriesDataset,
    settings: &RunSettings,
    seed: u64,
) -> Result<Vec<(Method, RunResult)>> {
    let alpha = settings.alpha;
    let sequential = SplitPolicy::sequential(settings.train_fraction);
    let online_seed = derive(seed, stream::MODEL, 0);
    let steps = if methods.iter().any(Method::uses_online_steps) {
        let s = online_steps(spec, data, &sequential, settings.refit_every, online_seed)?;
        check_causality(&s, data.t0())?;
        Some(s)
    } else {
        None
    };
    let ensemble = if methods.iter().any(Method::uses_ensemble) {
        let ens_spec = RegressorSpec {
            bootstrap: false,
            ..spec.clone()
        };
        Some(EnbpiEnsemble::fit(&ens_spec, data, settings.enbpi_models, derive(seed, stream::BOOTSTRAP, 0))?)
    } else {
        None
    };
    let steps = steps.as_deref();
    let mut out = Vec::with_capacity(methods.len());
    for &m in methods {
        let result = match m {
            Method::Scp => scp(spec, data, alpha, &sequential, online_seed)?,
            Method::Osscp => osscp_from_steps(steps.expect("computed"), alpha)?,
            Method::OsscpRand => {
                let policy = SplitPolicy::randomized(settings.train_fraction);
                let s = online_steps(spec, data, &policy, settings.refit_every, derive(seed, stream::SPLIT, 0))?;
                check_causality(&s, data.t0())?;
                osscp_from_steps(&s, alpha)?
            }
            Method::Aci(gamma) => run_aci(steps.expect("computed"), alpha, gamma, false)?,
            Method::Agaci => agaci_from_steps(steps.expect("computed"), alpha, &settings.agaci)?.result,
            Method::Naive => {
                naive_from_steps(steps.expect("computed"), alpha, &settings.agaci.gammas, settings.naive_warmup)?
            }
            Method::Enbpi | Method::EnbpiV2 => {
                ensemble
                    .as_ref()
                    .expect("computed")
                    .run(data, alpha, 1, m == Method::EnbpiV2)?
            }
        };
        out.push((m, result));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tscp_core::datagen::{generate_dataset, NoiseSpec};
    use tscp_core::methods::{aci, osscp};

    #[test]
    fn shared_runs_match_the_standalone_methods() {
        let d = generate_dataset(6, 60, 20, &NoiseSpec::new(0.8, 0.8, 1.0).unwrap(), 3).unwrap();
        let spec = RegressorSpec::bagged_trees(5);
        let seed = 11;
        let methods = [Method::Osscp, Method::Aci(0.05)];
        let out = run_methods(&methods, &spec, &d, &RunSettings::new(0.1), seed).unwrap();
        let online_seed = derive(seed, stream::MODEL, 0);
        assert_eq!(out[0].1, osscp(&spec, &d, 0.1, &SplitPolicy::default(), 1, online_seed).unwrap());
        assert_eq!(out[1].1, aci(&spec, &d, 0.1, 0.05, 1, online_seed).unwrap());
    }

    #[test]
    fn every_method_runs() {
        let d = generate_dataset(6, 60, 20, &NoiseSpec::white(1.0), 4).unwrap();
        let methods: Vec<Method> = ["scp", "osscp", "osscp_rand", "aci_0", "agaci", "naive", "enbpi", "enbpi_v2"]
            .iter()
            .map(|m| m.parse().unwrap())
            .collect();
        let mut settings = RunSettings::new(0.1);
        settings.naive_warmup = 5;
        let out = run_methods(&methods, &RegressorSpec::ridge(1.0), &d, &settings, 0).unwrap();
        for (m, r) in &out {
            assert_eq!(r.len(), 20, "{m}");
            let metrics = Metrics::of(r);
            assert!((0.0..=1.0).contains(&metrics.coverage));
            assert!((0.0..=100.0).contains(&metrics.pct_infinite));
        }
    }

    #[test]
    fn lookahead_is_detected() {
        let step = OnlineStep {
            scores: vec![1.0],
            forecast: 0.0,
            target: 0.0,
            latest_index_used: 10,
            model_fingerprint: 0,
        };
        assert!(check_causality(&[step.clone()], 11).is_ok());
        assert!(matches!(check_causality(&[step], 10), Err(HarnessError::Causality(_))));
    }
}
