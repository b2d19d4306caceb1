//! Sequential bidding in repeated second-price auctions with censored feedback.
//!
//! The bidder only observes the item value when it wins the auction. This
//! crate provides the environment model ([`model`]), the Bernoulli-KL and
//! Hoeffding/Bernstein confidence kernels ([`confidence`]), the bidding
//! strategies ([`strategy`]), a deterministic Monte Carlo regret harness
//! ([`simulator`]) and closed-form evaluators for the known regret bounds
//! ([`bounds`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod confidence;
pub mod error;
pub mod model;
pub mod rng;
pub mod simulator;
pub mod strategy;

pub use confidence::{bernoulli_kl, bernstein_bonus, hoeffding_bonus, kl_lcb, kl_ucb, KlInversionConfig};
pub use error::{Error, Result};
pub use model::{
    expected_round_regret, optimal_cumulative_utility, play_round, AuctionOutcome, Observation,
    OpponentDistribution, ValueDistribution,
};
pub use simulator::{
    run_experiment, run_trial, win_rate_curve, CheckpointStats, ExperimentConfig, Parallelism,
    RegretEstimator, RegretTrajectory, StrategyCurve, TrialRecord,
};
pub use strategy::{BiddingStrategy, EtgVariant, RunningMoments, StrategySpec};
