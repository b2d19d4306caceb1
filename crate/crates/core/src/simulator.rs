//! Seeded Monte Carlo regret harness.
//!
//! Every strategy of an experiment replays the same trial seeds, so all
//! strategies face the same value and opponent sequences. Trial results are
//! stored and reduced in trial order, which makes the aggregate independent
//! of the thread count.

use std::io::{self, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AuctionOutcome, OpponentDistribution, ValueDistribution};
use crate::rng::{stream_rng, trial_seed, Stream};
use crate::strategy::{BiddingStrategy, StrategySpec};

pub const DEFAULT_CHECKPOINT_COUNT: usize = 200;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegretEstimator {
    /// Adds the exact expected regret of the submitted bid each round.
    #[default]
    Conditional,
    /// Adds `(M - V) 1{v < M <= B} + (V - M) 1{B < M <= v}` each round.
    Realized,
}

impl std::str::FromStr for RegretEstimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conditional" => Ok(Self::Conditional),
            "realized" => Ok(Self::Realized),
            other => Err(Error::Config(format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Parallelism {
    Serial,
    Threads(usize),
    /// Rayon's global pool.
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub value: ValueDistribution,
    pub opponent: OpponentDistribution,
    pub horizon: u64,
    pub trials: u64,
    pub base_seed: u64,
    pub strategies: Vec<StrategySpec>,
    /// Sorted, distinct rounds in `1..=horizon` at which regret is recorded.
    pub checkpoints: Vec<u64>,
    #[serde(default)]
    pub estimator: RegretEstimator,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.horizon < 1 {
            return fail("horizon must be at least 1".into());
        }
        if self.trials < 1 {
            return fail("trials must be at least 1".into());
        }
        if self.strategies.is_empty() {
            return fail("no strategies configured".into());
        }
        for (i, s) in self.strategies.iter().enumerate() {
            s.validate()?;
            if self.strategies[..i].iter().any(|o| o.id() == s.id()) {
                return fail(format!("strategy `{}` configured twice", s.id()));
            }
        }
        match (self.checkpoints.first(), self.checkpoints.last()) {
            (Some(&first), Some(&last)) if first >= 1 && last <= self.horizon => {}
            (None, _) => return fail("checkpoints must not be empty".into()),
            _ => return fail(format!("checkpoints must lie in 1..={}", self.horizon)),
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return fail("checkpoints must be strictly increasing".into());
        }
        Ok(())
    }
}

/// About `count` log-spaced rounds in `1..=horizon`, together with every
/// `10^k` and `5 * 10^k` below the horizon and the horizon itself.
pub fn log_spaced_checkpoints(horizon: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count + 16);
    if horizon == 0 {
        return out;
    }
    let top = (horizon as f64).ln();
    let steps = count.max(2) - 1;
    for i in 0..=steps {
        let t = (top * i as f64 / steps as f64).exp().round() as u64;
        out.push(t.clamp(1, horizon));
    }
    let mut decade = 1u64;
    while decade <= horizon {
        out.push(decade);
        if decade * 5 <= horizon {
            out.push(decade * 5);
        }
        decade = decade.saturating_mul(10);
    }
    out.push(horizon);
    out.sort_unstable();
    out.dedup();
    out
}

/// One trial of one strategy: cumulative regret and win count at each checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub regret: Vec<f64>,
    pub wins: Vec<u64>,
}

impl TrialRecord {
    pub fn final_wins(&self) -> u64 {
        self.wins.last().copied().unwrap_or(0)
    }
}

/// Plays `config.horizon` rounds of `strategy` on the environment seeded by `seed`.
pub fn run_trial(config: &ExperimentConfig, strategy: &mut dyn BiddingStrategy, seed: u64) -> TrialRecord {
    let mut values = stream_rng(seed, Stream::Values);
    let mut opponents = stream_rng(seed, Stream::Opponent);
    let value = &config.value;
    let opp = &config.opponent;
    let v = value.mean();

    let n = config.checkpoints.len();
    let mut record = TrialRecord { regret: Vec::with_capacity(n), wins: Vec::with_capacity(n) };
    let mut next = config.checkpoints.iter().copied().peekable();
    let mut cumulative = 0.0;

    for t in 1..=config.horizon {
        let item_value = value.sample_with(values.random::<f64>());
        let max_bid = opp.sample_with(opponents.random::<f64>());
        let bid = strategy.next_bid(t).clamp(0.0, 1.0);
        let outcome = AuctionOutcome::settle(bid, max_bid, item_value);
        strategy.update(outcome.observation());
        cumulative += match config.estimator {
            RegretEstimator::Conditional => opp.round_regret(bid, v),
            RegretEstimator::Realized => {
                if v < max_bid && max_bid <= bid {
                    max_bid - item_value
                } else if bid < max_bid && max_bid <= v {
                    item_value - max_bid
                } else {
                    0.0
                }
            }
        };
        if next.peek() == Some(&t) {
            next.next();
            record.regret.push(cumulative);
            record.wins.push(strategy.wins());
        }
    }
    record
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointStats {
    pub t: u64,
    pub mean_regret: f64,
    /// Sample standard deviation over trials divided by `sqrt(trials)`.
    pub stderr: f64,
    pub mean_win_rate: f64,
    pub win_rate_stderr: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyCurve {
    pub strategy: String,
    pub points: Vec<CheckpointStats>,
}

impl StrategyCurve {
    pub fn at(&self, t: u64) -> Option<&CheckpointStats> {
        self.points.iter().find(|p| p.t == t)
    }

    pub fn last(&self) -> &CheckpointStats {
        self.points.last().expect("curves have at least one checkpoint")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretTrajectory {
    pub curves: Vec<StrategyCurve>,
}

impl RegretTrajectory {
    pub fn curve(&self, strategy: &str) -> Option<&StrategyCurve> {
        self.curves.iter().find(|c| c.strategy == strategy)
    }

    pub const CSV_HEADER: &'static str = "strategy,t,mean_regret,stderr,mean_win_rate,trials";

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        self.write_csv_rows(&mut out, "")
    }

    /// Rows without the header, each prefixed by `prefix` (e.g. `"0.2,"`).
    pub fn write_csv_rows<W: Write>(&self, out: &mut W, prefix: &str) -> io::Result<()> {
        for curve in &self.curves {
            for p in &curve.points {
                writeln!(
                    out,
                    "{prefix}{},{},{},{},{},{}",
                    curve.strategy,
                    p.t,
                    format_sig(p.mean_regret),
                    format_sig(p.stderr),
                    format_sig(p.mean_win_rate),
                    p.trials
                )?;
            }
        }
        Ok(())
    }
}

/// Fixed-point decimal with 10 significant digits.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 10;
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (DIGITS - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Mean `N_t / t` at each checkpoint.
pub fn win_rate_curve(curve: &StrategyCurve) -> Vec<(u64, f64)> {
    curve.points.iter().map(|p| (p.t, p.mean_win_rate)).collect()
}

fn mean_and_stderr(xs: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

fn aggregate(config: &ExperimentConfig, strategy: &str, trials: &[TrialRecord]) -> StrategyCurve {
    let points = config
        .checkpoints
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let (mean_regret, stderr) = mean_and_stderr(trials.iter().map(|r| r.regret[k]));
            let (mean_win_rate, win_rate_stderr) =
                mean_and_stderr(trials.iter().map(|r| r.wins[k] as f64 / t as f64));
            CheckpointStats {
                t,
                mean_regret,
                stderr,
                mean_win_rate,
                win_rate_stderr,
                trials: trials.len() as u64,
            }
        })
        .collect();
    StrategyCurve { strategy: strategy.to_string(), points }
}

fn run_all(config: &ExperimentConfig, spec: &StrategySpec, parallel: bool) -> Result<Vec<TrialRecord>> {
    let one = |i: u64| -> Result<TrialRecord> {
        let mut strategy = spec.build(config.horizon)?;
        Ok(run_trial(config, strategy.as_mut(), trial_seed(config.base_seed, i)))
    };
    if parallel {
        (1..=config.trials).into_par_iter().map(one).collect()
    } else {
        (1..=config.trials).map(one).collect()
    }
}

/// Runs every configured strategy for `config.trials` trials with seeds
/// `base_seed + 1 ..= base_seed + trials`.
pub fn run_experiment(config: &ExperimentConfig, parallelism: Parallelism) -> Result<RegretTrajectory> {
    config.validate()?;
    let run = |parallel: bool| -> Result<RegretTrajectory> {
        let curves = config
            .strategies
            .iter()
            .map(|spec| Ok(aggregate(config, spec.id(), &run_all(config, spec, parallel)?)))
            .collect::<Result<_>>()?;
        Ok(RegretTrajectory { curves })
    };
    match parallelism {
        Parallelism::Serial | Parallelism::Threads(1) => run(false),
        Parallelism::Auto => run(true),
        Parallelism::Threads(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?
            .install(|| run(true)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(strategies: Vec<StrategySpec>) -> ExperimentConfig {
        ExperimentConfig {
            value: ValueDistribution::bernoulli(0.2).unwrap(),
            opponent: OpponentDistribution::uniform(),
            horizon: 200,
            trials: 8,
            base_seed: 42,
            strategies,
            checkpoints: vec![1, 10, 100, 200],
            estimator: RegretEstimator::Conditional,
        }
    }

    #[test]
    fn checkpoints_include_decades() {
        let c = log_spaced_checkpoints(100_000, 200);
        for t in [1, 5, 10, 1000, 5000, 10_000, 50_000, 100_000] {
            assert!(c.contains(&t), "{t}");
        }
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(log_spaced_checkpoints(1, 200), vec![1]);
    }

    #[test]
    fn validation() {
        let mut c = config(vec![StrategySpec::ucbid()]);
        assert!(c.validate().is_ok());
        c.checkpoints = vec![10, 5];
        assert!(c.validate().is_err());
        c.checkpoints = vec![300];
        assert!(c.validate().is_err());
        c.checkpoints = vec![];
        assert!(c.validate().is_err());
        let c = config(vec![StrategySpec::ucbid(), StrategySpec::ucbid()]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_trial_has_zero_stderr() {
        let mut c = config(vec![StrategySpec::klucbid()]);
        c.trials = 1;
        let traj = run_experiment(&c, Parallelism::Serial).unwrap();
        assert!(traj.curves[0].points.iter().all(|p| p.stderr == 0.0));
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(320.0), "320.0000000");
        assert_eq!(format_sig(0.005), "0.005000000000");
        assert_eq!(format_sig(-1.5), "-1.500000000");
    }

    #[test]
    fn estimator_parses() {
        assert_eq!("realized".parse::<RegretEstimator>().unwrap(), RegretEstimator::Realized);
        assert!("other".parse::<RegretEstimator>().is_err());
    }
}
