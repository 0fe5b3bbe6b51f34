use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::metrics::SplitSpec;
use crate::bayes::{Hyperparams, DEFAULT_ITERATIONS};
use crate::clustering::{default_params, DbscanParams};
use crate::csl::{CslConfig, ModalityParams};
use crate::error::{Error, Result};
use crate::sim::ScenarioConfig;
use crate::types::Modality;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSelection {
    Csl,
    Baseline,
    Both,
}

impl ModelSelection {
    pub fn includes_csl(self) -> bool {
        matches!(self, Self::Csl | Self::Both)
    }

    pub fn includes_baseline(self) -> bool {
        matches!(self, Self::Baseline | Self::Both)
    }
}

impl std::str::FromStr for ModelSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csl" => Ok(Self::Csl),
            "baseline" => Ok(Self::Baseline),
            "both" => Ok(Self::Both),
            _ => Err(Error::Config(format!("unknown model {s:?} (csl|baseline|both)"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpsConfig {
    pub shape: Option<f64>,
    pub color: Option<f64>,
    pub action: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteringConfig {
    pub min_samples: Option<usize>,
    pub eps: EpsConfig,
}

impl ClusteringConfig {
    /// Per-modality DBSCAN parameters: explicit values win, the rest follow
    /// the noise-scale rule of `scenario`.
    pub fn resolve(&self, scenario: &ScenarioConfig) -> Result<ModalityParams> {
        let mut out = Vec::with_capacity(3);
        for m in Modality::PERCEPTUAL {
            let default = default_params(m, scenario)?;
            let eps = match m {
                Modality::Shape => self.eps.shape,
                Modality::Color => self.eps.color,
                _ => self.eps.action,
            };
            out.push(DbscanParams::new(
                eps.unwrap_or(default.eps),
                self.min_samples.unwrap_or(default.min_samples),
            )?);
        }
        Ok(ModalityParams(out.try_into().expect("three modalities")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BayesConfig {
    pub iterations: usize,
    /// Shorthand that sets K_s, K_c and K_a together.
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(flatten)]
    pub hyper: Hyperparams,
    // Catches keys that neither field above claims; must stay empty.
    #[serde(flatten, skip_serializing)]
    unknown: BTreeMap<String, toml::Value>,
}

impl Default for BayesConfig {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_ITERATIONS,
            k: None,
            hyper: Hyperparams::default(),
            unknown: BTreeMap::new(),
        }
    }
}

impl BayesConfig {
    pub fn hyperparams(&self) -> Hyperparams {
        match self.k {
            Some(k) => Hyperparams {
                k_s: k,
                k_c: k,
                k_a: k,
                ..self.hyper.clone()
            },
            None => self.hyper.clone(),
        }
    }
}

/// Everything that determines an experiment's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Scenario seed; also the root of every derived sequence and chain seed.
    pub seed: u64,
    pub n_sequences: usize,
    /// Training fraction: 1.0 trains and tests on everything, below 1.0 holds
    /// out the tail of each sequence.
    pub split: f64,
    pub model: ModelSelection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Scenario settings; its own `seed` field is ignored in favour of `seed`.
    pub scenario: ScenarioConfig,
    pub clustering: ClusteringConfig,
    pub csl: CslConfig,
    pub bayes: BayesConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_sequences: 10,
            split: 1.0,
            model: ModelSelection::Both,
            out_dir: None,
            scenario: ScenarioConfig::default(),
            clustering: ClusteringConfig::default(),
            csl: CslConfig::default(),
            bayes: BayesConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn split_spec(&self) -> Result<SplitSpec> {
        SplitSpec::from_fraction(self.split)
    }

    pub fn scenario_config(&self) -> ScenarioConfig {
        ScenarioConfig {
            seed: self.seed,
            ..self.scenario.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sequences == 0 {
            return Err(Error::Config("n_sequences must be >= 1".into()));
        }
        if let Some(key) = self.bayes.unknown.keys().next() {
            return Err(Error::Config(format!("unknown key bayes.{key}")));
        }
        if !(self.csl.aux_factor.is_finite() && self.csl.aux_factor > 0.0) {
            return Err(Error::Config(format!(
                "csl.aux_factor must be positive, got {}",
                self.csl.aux_factor
            )));
        }
        if self.bayes.k == Some(0) {
            return Err(Error::Config("bayes.K must be >= 1".into()));
        }
        self.split_spec()?;
        self.scenario_config().validate()?;
        self.clustering.resolve(&self.scenario_config())?;
        self.bayes.hyperparams().validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_all_defaults() {
        let cfg = RunConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.bayes.iterations, 100);
        assert_eq!(cfg.bayes.hyperparams().k_s, 5);
    }

    #[test]
    fn documented_keys_parse() {
        let cfg = RunConfig::from_toml_str(
            r#"
            seed = 7
            split = 0.6
            model = "csl"
            [clustering]
            min_samples = 3
            [clustering.eps]
            shape = 0.5
            [csl]
            aux_factor = 3.0
            freeze_after = 50
            [bayes]
            iterations = 20
            K = 4
            gamma = 0.5
            [bayes.beta_a]
            kappa0 = 0.1
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.model, ModelSelection::Csl);
        let params = cfg.clustering.resolve(&cfg.scenario_config()).unwrap();
        assert_eq!(params.0[0].eps, 0.5);
        assert_eq!(params.0[2].min_samples, 3);
        assert_eq!(cfg.csl.freeze_after, Some(50));
        let h = cfg.bayes.hyperparams();
        assert_eq!((h.k_s, h.k_c, h.k_a), (4, 4, 4));
        assert_eq!(h.gamma, 0.5);
        assert_eq!(h.beta_a.kappa0, 0.1);
        assert_eq!(h.beta_s.kappa0, 0.01);
    }

    #[test]
    fn bad_configs_are_config_errors() {
        for text in [
            "n_sequences = 0",
            "split = 0.0",
            "model = \"svm\"",
            "[clustering]\nmin_samples = 0",
            "[bayes]\nK = 0",
            "[bayes]\nlambda = -1.0",
            "[bayes]\nitertions = 5",
            "[bayes.beta_s]\npsi_scale = 1.0\nfoo = 1",
            "[csl]\naux_factr = 2.0",
            "[scenario]\nnoise_scale = 0.0",
            "bogus = 1",
        ] {
            let err = RunConfig::from_toml_str(text).unwrap_err();
            assert!(err.is_config(), "{text:?} gave {err}");
        }
    }
}
