use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::behavior::BehaviorParams;
use crate::engine::StealLimits;
use crate::error::{Error, Result};
use crate::valuation::ValuationModel;

/// Parameters of the correlated and negatively correlated models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub rho: f64,
    pub sigma_neg: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { rho: 0.7, sigma_neg: 0.2 }
    }
}

/// The three valuation models in experiment order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Independent,
    Correlated,
    Negative,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Independent, ModelKind::Correlated, ModelKind::Negative];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Independent => "independent",
            ModelKind::Correlated => "correlated",
            ModelKind::Negative => "negative",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn with_params(self, params: &ModelParams) -> ValuationModel {
        match self {
            ModelKind::Independent => ValuationModel::Independent,
            ModelKind::Correlated => ValuationModel::Correlated { rho: params.rho },
            ModelKind::Negative => ValuationModel::Negative { sigma: params.sigma_neg },
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model {s:?} (expected independent, correlated or negative)")))
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Experiment configuration. Every field is optional in the JSON form.
///
/// ```
/// use giftex::harness::ExperimentConfig;
///
/// let config: ExperimentConfig = serde_json::from_str(r#"{"games_per_condition": 50, "behavior": {"tau": 0.5}}"#).unwrap();
/// assert_eq!(config.n_players, 29);
/// assert_eq!(config.games_per_condition, 50);
/// assert_eq!(config.behavior.tau, 0.5);
/// assert_eq!(config.behavior.c0, 0.05);
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_players: usize,
    /// Scaled down from the 5000 of the full-size experiment.
    pub games_per_condition: usize,
    pub base_seed: u64,
    pub steal_limits: StealLimits,
    pub behavior: BehaviorParams,
    pub models: ModelParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_players: 29,
            games_per_condition: 1000,
            base_seed: 42,
            steal_limits: StealLimits::standard(),
            behavior: BehaviorParams::default(),
            models: ModelParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfiguration(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file. A missing or unreadable file is an I/O error; bad
    /// contents are a configuration error.
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_players == 0 {
            return Err(Error::InvalidConfiguration("n_players must be at least 1".into()));
        }
        self.behavior.validate()?;
        for kind in ModelKind::ALL {
            kind.with_params(&self.models).validate()?;
        }
        Ok(())
    }
}
