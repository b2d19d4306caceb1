//! TOML experiment files.
//!
//! ```toml
//! horizon = 10000
//! trials = 2000
//! seed = 1
//! estimator = "conditional"
//!
//! [value]
//! kind = "bernoulli"
//! mean = 0.2
//!
//! [opponent]
//! kind = "uniform"
//!
//! [[strategies]]
//! id = "ucbid"
//! gamma = 1.1
//! ```

use serde::{Deserialize, Serialize};
use ucbid_core::simulator::{log_spaced_checkpoints, DEFAULT_CHECKPOINT_COUNT};
use ucbid_core::{ExperimentConfig, OpponentDistribution, RegretEstimator, StrategySpec, ValueDistribution};

use crate::error::{CliError, Result};

pub const DEFAULT_TRIALS: u64 = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub horizon: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub estimator: RegretEstimator,
    /// Explicit checkpoints; log-spaced ones are generated when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(default = "default_checkpoint_count")]
    pub checkpoint_count: usize,
    /// Value law; a sweep replaces it with Bernoulli laws.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<ValueDistribution>,
    #[serde(default = "OpponentDistribution::uniform")]
    pub opponent: OpponentDistribution,
    pub strategies: Vec<StrategySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

/// Runs the experiment once per Bernoulli value mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub values: Vec<f64>,
}

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

fn default_checkpoint_count() -> usize {
    DEFAULT_CHECKPOINT_COUNT
}

impl ConfigFile {
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut tree: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut tree, o)?;
        }
        Self::from_table(tree)
    }

    pub fn from_table(tree: toml::Table) -> Result<Self> {
        let cfg: Self = toml::Value::Table(tree)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("configs serialize to TOML tables")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize to TOML")
    }

    /// Applies `key=value` overrides to an already loaded config.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut tree = self.to_table();
        for o in overrides {
            apply_override(&mut tree, o)?;
        }
        Self::from_table(tree)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.value, &self.sweep) {
            (None, None) => {
                return Err(CliError::Config("need a [value] section or a [sweep] section".into()))
            }
            (_, Some(s)) if s.values.is_empty() => {
                return Err(CliError::Config("sweep has no values".into()))
            }
            (_, Some(s)) => {
                for &v in &s.values {
                    ValueDistribution::bernoulli(v)?;
                }
            }
            _ => {}
        }
        self.experiment(self.value.clone().unwrap_or_else(|| ValueDistribution::bernoulli(0.5).unwrap()))
            .validate()?;
        Ok(())
    }

    pub fn checkpoints(&self) -> Vec<u64> {
        self.checkpoints
            .clone()
            .unwrap_or_else(|| log_spaced_checkpoints(self.horizon, self.checkpoint_count))
    }

    fn experiment(&self, value: ValueDistribution) -> ExperimentConfig {
        ExperimentConfig {
            value,
            opponent: self.opponent.clone(),
            horizon: self.horizon,
            trials: self.trials,
            base_seed: self.seed,
            strategies: self.strategies.clone(),
            checkpoints: self.checkpoints(),
            estimator: self.estimator,
        }
    }

    /// The single experiment of a config without a sweep.
    pub fn to_experiment(&self) -> Result<ExperimentConfig> {
        match (&self.value, &self.sweep) {
            (Some(value), None) => Ok(self.experiment(value.clone())),
            _ => Err(CliError::Usage("config describes a sweep; use the `sweep` command".into())),
        }
    }

    /// One experiment per sweep point, all sharing the same seeds.
    pub fn sweep_experiments(&self) -> Result<Vec<(f64, ExperimentConfig)>> {
        let sweep =
            self.sweep.as_ref().ok_or_else(|| CliError::Usage("config has no [sweep] section".into()))?;
        sweep.values.iter().map(|&v| Ok((v, self.experiment(ValueDistribution::bernoulli(v)?)))).collect()
    }
}

/// Sets `key` (a dotted path) to `value` parsed as a TOML value, or as a
/// string when it does not parse. `strategies.<id>.<field>` addresses the
/// strategy with that id.
pub fn apply_override(tree: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override `{assignment}` is not of the form key=value")))?;
    let value = parse_value(raw.trim());
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("bad override key `{key}`")));
    }
    let mut table = tree;
    let mut rest = &path[..];
    while rest.len() > 1 {
        let head = rest[0];
        if head == "strategies" {
            let id = rest[1];
            let list = table
                .get_mut("strategies")
                .and_then(toml::Value::as_array_mut)
                .ok_or_else(|| CliError::Config("config has no strategies".into()))?;
            let entry = list
                .iter_mut()
                .filter_map(toml::Value::as_table_mut)
                .find(|t| t.get("id").and_then(toml::Value::as_str) == Some(id))
                .ok_or_else(|| CliError::Config(format!("no strategy `{id}` to override")))?;
            table = entry;
            rest = &rest[2..];
            if rest.is_empty() {
                return Err(CliError::Usage(format!("override `{key}` names no field")));
            }
            continue;
        }
        table = table
            .entry(head)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("`{head}` is not a section")))?;
        rest = &rest[1..];
    }
    table.insert(rest[0].to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
