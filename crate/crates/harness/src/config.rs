//! Benchmark configuration, read from TOML.
//!
//! ```toml
//! config_version = 1
//! methods = ["scp", "osscp", "aci_0.05", "agaci"]
//! alpha = 0.1
//! t0 = 200
//! t1 = 100
//! repetitions = 500
//! seed = 0
//! output_dir = "results"
//!
//! [[noise]]
//! phi = 0.9
//! theta = 0.9
//! variance = 10.0
//!
//! [model]
//! kind = "bagged_trees"
//! tree_count = 1000
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tscp_core::datagen::NoiseSpec;
use tscp_core::models::{ModelKind, RegressorSpec};

use crate::error::{HarnessError, Result};
use crate::registry::{parse_methods, Method};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseCell {
    pub phi: f64,
    pub theta: f64,
    pub variance: f64,
}

impl NoiseCell {
    pub fn arma(phi: f64, theta: f64, variance: f64) -> Self {
        Self { phi, theta, variance }
    }

    pub fn spec(&self) -> Result<NoiseSpec> {
        Ok(NoiseSpec::new(self.phi, self.theta, self.variance)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub tree_count: usize,
    pub min_leaf: usize,
    pub max_features: Option<usize>,
    pub ridge_penalty: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::BaggedTrees,
            tree_count: 1000,
            min_leaf: 1,
            max_features: None,
            ridge_penalty: 1.0,
        }
    }
}

impl ModelConfig {
    pub fn spec(&self) -> RegressorSpec {
        match self.kind {
            ModelKind::Ridge => RegressorSpec::ridge(self.ridge_penalty),
            ModelKind::BaggedTrees => RegressorSpec {
                min_leaf: self.min_leaf,
                max_features: self.max_features,
                ..RegressorSpec::bagged_trees(self.tree_count)
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub config_version: u32,
    pub methods: Vec<String>,
    pub noise: Vec<NoiseCell>,
    pub alpha: f64,
    pub t0: usize,
    pub t1: usize,
    pub repetitions: usize,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_features")]
    pub n_features: usize,
    #[serde(default)]
    pub model: ModelConfig,
    /// Refit the online methods every `refit_every` test points.
    #[serde(default = "default_refit")]
    pub refit_every: usize,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_enbpi_models")]
    pub enbpi_models: usize,
    #[serde(default = "default_warmup")]
    pub naive_warmup: usize,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_features() -> usize {
    6
}

fn default_refit() -> usize {
    1
}

fn default_train_fraction() -> f64 {
    0.5
}

fn default_enbpi_models() -> usize {
    30
}

fn default_warmup() -> usize {
    50
}

impl ExperimentConfig {
    /// Synthetic ARMA benchmark: `T0 = 200`, `T1 = 100`, 500 repetitions,
    /// `φ = θ` over the usual grid with asymptotic variance 10.
    pub fn paper_default() -> Self {
        Self {
            config_version: CONFIG_VERSION,
            methods: ["scp", "osscp", "aci_0.01", "aci_0.05", "agaci", "naive", "enbpi", "enbpi_v2"]
                .map(String::from)
                .to_vec(),
            noise: [0.1, 0.8, 0.9, 0.95, 0.99].map(|p| NoiseCell::arma(p, p, 10.0)).to_vec(),
            alpha: 0.1,
            t0: 200,
            t1: 100,
            repetitions: 500,
            seed: 0,
            output_dir: default_output_dir(),
            n_features: default_features(),
            model: ModelConfig::default(),
            refit_every: default_refit(),
            train_fraction: default_train_fraction(),
            enbpi_models: default_enbpi_models(),
            naive_warmup: default_warmup(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn parsed_methods(&self) -> Result<Vec<Method>> {
        parse_methods(&self.methods)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(HarnessError::Config(m));
        if self.config_version != CONFIG_VERSION {
            return fail(format!(
                "config_version {} is not supported (expected {CONFIG_VERSION})",
                self.config_version
            ));
        }
        if self.repetitions == 0 {
            return fail("repetitions must be >= 1".into());
        }
        if self.methods.is_empty() {
            return fail("at least one method is required".into());
        }
        self.parsed_methods()?;
        if self.noise.is_empty() {
            return fail("at least one noise cell is required".into());
        }
        for n in &self.noise {
            n.spec()?;
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if self.t0 < 4 || self.t1 == 0 {
            return fail("t0 must be >= 4 and t1 >= 1".into());
        }
        if self.n_features == 0 || self.refit_every == 0 || self.enbpi_models == 0 {
            return fail("n_features, refit_every and enbpi_models must be >= 1".into());
        }
        self.model.spec().validate(self.n_features)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
config_version = 1
methods = ["scp", "aci_0.05"]
alpha = 0.1
t0 = 200
t1 = 100
repetitions = 3
seed = 7

[[noise]]
phi = 0.9
theta = 0.9
variance = 10.0

[model]
kind = "ridge"
ridge_penalty = 0.5
"#;

    #[test]
    fn parses_the_documented_schema() {
        let cfg = ExperimentConfig::from_toml(EXAMPLE).unwrap();
        assert_eq!(cfg.repetitions, 3);
        assert_eq!(cfg.model.spec(), RegressorSpec::ridge(0.5));
        assert_eq!(cfg.n_features, 6);
        assert_eq!(cfg.output_dir, PathBuf::from("results"));
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ExperimentConfig::paper_default();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            EXAMPLE.replace("config_version = 1", "config_version = 2"),
            EXAMPLE.replace("repetitions = 3", "repetitions = 0"),
            EXAMPLE.replace("\"aci_0.05\"", "\"cqr\""),
            EXAMPLE.replace("phi = 0.9", "phi = 1.0"),
            EXAMPLE.replace("alpha = 0.1", "alpha = 1.5"),
            EXAMPLE.replace("seed = 7", "seed = 7\nunknown = 1"),
        ];
        for text in &bad {
            assert!(ExperimentConfig::from_toml(text).is_err(), "{text}");
        }
        let err = ExperimentConfig::from_toml(&bad[2]).unwrap_err();
        assert!(matches!(err, HarnessError::UnknownMethod(ref m) if m == "cqr"));
    }
}
