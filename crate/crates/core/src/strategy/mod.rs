//! Bidding strategies. Every strategy emits a bid for round `t`, then
//! consumes the censored [`Observation`] of that round.

mod baseline;
mod etg;
mod ucb;

use serde::{Deserialize, Serialize};

use crate::confidence::KlInversionConfig;
use crate::error::{Error, Result};
use crate::model::Observation;

pub use baseline::{greedy_next_bid, ConstantBid, DiscreteUcb, Greedy};
pub use etg::{EtgPhase, EtgStop, EtgVariant};
pub use ucb::{bernstein_ucbid_next_bid, klucbid_next_bid, ucbid_next_bid, BernsteinUcbid, KlUcbid, Ucbid};

pub const DEFAULT_UCB_GAMMA: f64 = 1.1;
pub const DEFAULT_BERNSTEIN_GAMMA: f64 = 2.1;
pub const DEFAULT_DISCRETE_ARMS: u32 = 100;
/// `sqrt(4 ln t / (2 n))` is the classical UCB1 width for rewards in `[0, 1]`.
pub const DEFAULT_DISCRETE_GAMMA: f64 = 4.0;

/// A sequential bidder.
///
/// Implementations only ever see the censored observation: the opponent
/// bid and the item value of a lost round are not part of [`Observation`].
pub trait BiddingStrategy: Send {
    /// Bid for round `round` (1-based), in `[0, 1]`.
    fn next_bid(&mut self, round: u64) -> f64;

    fn update(&mut self, observation: Observation);

    /// Number of auctions won so far.
    fn wins(&self) -> u64;
}

/// Count, mean and population variance of the observed values.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn new() -> Self {
        Self::default()
    }

    /// Moments with the given sufficient statistics, e.g. for evaluating a
    /// bid formula at a prescribed state.
    pub fn from_parts(count: u64, mean: f64, variance: f64) -> Self {
        Self { count, mean, m2: variance * count as f64 }
    }

    pub fn from_values(values: &[f64]) -> Self {
        let mut m = Self::new();
        values.iter().for_each(|&x| m.push(x));
        m
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    #[inline]
    pub fn count(&self) -> u64 {
        self.count
    }

    #[inline]
    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then_some(self.mean)
    }

    /// Population variance, clamped to `[0, 1/4]` (values live in `[0, 1]`).
    #[inline]
    pub fn variance(&self) -> Option<f64> {
        (self.count > 0).then(|| (self.m2 / self.count as f64).clamp(0.0, 0.25))
    }
}

/// Serializable description of a strategy; the `id` tag is the identifier
/// used in configs and CSV output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategySpec {
    Ucbid {
        #[serde(default = "default_ucb_gamma")]
        gamma: f64,
    },
    Klucbid {
        #[serde(default = "default_ucb_gamma")]
        gamma: f64,
        #[serde(default = "default_kl_tolerance")]
        tolerance: f64,
        #[serde(default = "default_kl_iterations")]
        max_iterations: u32,
    },
    BernsteinUcbid {
        #[serde(default = "default_bernstein_gamma")]
        gamma: f64,
    },
    Etgstop,
    EtgstopModified,
    Greedy,
    DiscreteUcb {
        #[serde(default = "default_arms")]
        arms: u32,
        #[serde(default = "default_discrete_gamma")]
        gamma: f64,
    },
    /// Always bids the same amount; bidding the value mean is the oracle.
    Constant {
        bid: f64,
    },
}

fn default_ucb_gamma() -> f64 {
    DEFAULT_UCB_GAMMA
}
fn default_bernstein_gamma() -> f64 {
    DEFAULT_BERNSTEIN_GAMMA
}
fn default_kl_tolerance() -> f64 {
    KlInversionConfig::default().tolerance
}
fn default_kl_iterations() -> u32 {
    KlInversionConfig::default().max_iterations
}
fn default_arms() -> u32 {
    DEFAULT_DISCRETE_ARMS
}
fn default_discrete_gamma() -> f64 {
    DEFAULT_DISCRETE_GAMMA
}

impl StrategySpec {
    pub fn ucbid() -> Self {
        Self::Ucbid { gamma: DEFAULT_UCB_GAMMA }
    }

    pub fn klucbid() -> Self {
        Self::Klucbid {
            gamma: DEFAULT_UCB_GAMMA,
            tolerance: default_kl_tolerance(),
            max_iterations: default_kl_iterations(),
        }
    }

    pub fn bernstein_ucbid() -> Self {
        Self::BernsteinUcbid { gamma: DEFAULT_BERNSTEIN_GAMMA }
    }

    pub fn discrete_ucb() -> Self {
        Self::DiscreteUcb { arms: DEFAULT_DISCRETE_ARMS, gamma: DEFAULT_DISCRETE_GAMMA }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::Ucbid { .. } => "ucbid",
            Self::Klucbid { .. } => "klucbid",
            Self::BernsteinUcbid { .. } => "bernstein_ucbid",
            Self::Etgstop => "etgstop",
            Self::EtgstopModified => "etgstop_modified",
            Self::Greedy => "greedy",
            Self::DiscreteUcb { .. } => "discrete_ucb",
            Self::Constant { .. } => "constant",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, g: f64| {
            if g > 0.0 && g.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{}: {name} must be positive, got {g}", self.id())))
            }
        };
        match *self {
            Self::Ucbid { gamma } | Self::BernsteinUcbid { gamma } => positive("gamma", gamma),
            Self::Klucbid { gamma, tolerance, max_iterations } => {
                positive("gamma", gamma)?;
                KlInversionConfig::new(tolerance, max_iterations).map(|_| ())
            }
            Self::DiscreteUcb { arms, gamma } => {
                positive("gamma", gamma)?;
                if arms < 2 {
                    return Err(Error::Config(format!("discrete_ucb needs at least 2 arms, got {arms}")));
                }
                Ok(())
            }
            Self::Constant { bid } => {
                if (0.0..=1.0).contains(&bid) {
                    Ok(())
                } else {
                    Err(Error::Config(format!("constant bid {bid} is outside [0, 1]")))
                }
            }
            Self::Etgstop | Self::EtgstopModified | Self::Greedy => Ok(()),
        }
    }

    /// A fresh strategy instance for a run of `horizon` rounds.
    pub fn build(&self, horizon: u64) -> Result<Box<dyn BiddingStrategy>> {
        self.validate()?;
        Ok(match *self {
            Self::Ucbid { gamma } => Box::new(Ucbid::new(gamma)),
            Self::Klucbid { gamma, tolerance, max_iterations } => {
                Box::new(KlUcbid::new(gamma, KlInversionConfig::new(tolerance, max_iterations)?))
            }
            Self::BernsteinUcbid { gamma } => Box::new(BernsteinUcbid::new(gamma)),
            Self::Etgstop => Box::new(EtgStop::new(horizon, EtgVariant::Analyzed)?),
            Self::EtgstopModified => Box::new(EtgStop::new(horizon, EtgVariant::Modified)?),
            Self::Greedy => Box::new(Greedy::new()),
            Self::DiscreteUcb { arms, gamma } => Box::new(DiscreteUcb::new(arms, gamma)),
            Self::Constant { bid } => Box::new(ConstantBid::new(bid)),
        })
    }
}
