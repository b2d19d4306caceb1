//! The four simulation scenarios: regret over time for Bernoulli(0.2) and
//! for a low-variance two-point law, the baselines on Bernoulli(0.3), and
//! the regret at `t = 5000` as a function of the value mean.

use clap::ValueEnum;
use ucbid_core::{OpponentDistribution, RegretEstimator, StrategySpec, ValueDistribution};

use crate::config::{ConfigFile, Sweep, DEFAULT_TRIALS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
}

/// Value means of the sweep: `0, 0.05, ..., 0.95`.
pub fn sweep_grid() -> Vec<f64> {
    (0..20).map(|k| k as f64 / 20.0).collect()
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig1a => "fig1a",
            Self::Fig1b => "fig1b",
            Self::Fig1c => "fig1c",
            Self::Fig1d => "fig1d",
        }
    }

    pub fn config(self) -> ConfigFile {
        let ucb_family =
            vec![StrategySpec::ucbid(), StrategySpec::klucbid(), StrategySpec::bernstein_ucbid()];
        let base = ConfigFile {
            horizon: 10_000,
            trials: DEFAULT_TRIALS,
            seed: 1,
            estimator: RegretEstimator::Conditional,
            checkpoints: None,
            checkpoint_count: ucbid_core::simulator::DEFAULT_CHECKPOINT_COUNT,
            value: None,
            opponent: OpponentDistribution::uniform(),
            strategies: ucb_family.clone(),
            sweep: None,
        };
        match self {
            Self::Fig1a => ConfigFile { value: Some(ValueDistribution::bernoulli(0.2).unwrap()), ..base },
            Self::Fig1b => ConfigFile {
                horizon: 100_000,
                value: Some(ValueDistribution::two_point(0.195, 0.205, 0.5).unwrap()),
                ..base
            },
            Self::Fig1c => ConfigFile {
                value: Some(ValueDistribution::bernoulli(0.3).unwrap()),
                strategies: [
                    ucb_family,
                    vec![StrategySpec::EtgstopModified, StrategySpec::Greedy, StrategySpec::discrete_ucb()],
                ]
                .concat(),
                ..base
            },
            Self::Fig1d => ConfigFile {
                horizon: 5_000,
                checkpoints: Some(vec![5_000]),
                strategies: [ucb_family, vec![StrategySpec::EtgstopModified]].concat(),
                sweep: Some(Sweep { values: sweep_grid() }),
                ..base
            },
        }
    }
}
