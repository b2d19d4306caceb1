use super::{BiddingStrategy, RunningMoments};
use crate::model::Observation;

/// Running mean of the observed values, or 1 before the first observation.
#[inline]
pub fn greedy_next_bid(state: &RunningMoments) -> f64 {
    state.mean().unwrap_or(1.0)
}

#[derive(Debug, Clone, Default)]
pub struct Greedy {
    moments: RunningMoments,
}

impl Greedy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl BiddingStrategy for Greedy {
    fn next_bid(&mut self, _round: u64) -> f64 {
        greedy_next_bid(&self.moments)
    }

    fn update(&mut self, observation: Observation) {
        if let Observation::Won { value, .. } = observation {
            self.moments.push(value);
        }
    }

    fn wins(&self) -> u64 {
        self.moments.count()
    }
}

/// UCB1 over the bid grid `{1/K, 2/K, ..., 1}`, ignoring the auction
/// structure. Rewards are the realized utilities mapped from `[-1, 1]` to
/// `[0, 1]`.
#[derive(Debug, Clone)]
pub struct DiscreteUcb {
    gamma: f64,
    pulls: Vec<u64>,
    reward_sums: Vec<f64>,
    last_arm: usize,
    wins: u64,
}

impl DiscreteUcb {
    pub fn new(arms: u32, gamma: f64) -> Self {
        let k = arms as usize;
        Self { gamma, pulls: vec![0; k], reward_sums: vec![0.0; k], last_arm: 0, wins: 0 }
    }

    pub fn arms(&self) -> usize {
        self.pulls.len()
    }

    fn bid_of(&self, arm: usize) -> f64 {
        (arm + 1) as f64 / self.arms() as f64
    }

    fn select(&self, t: u64) -> usize {
        if let Some(arm) = self.pulls.iter().position(|&p| p == 0) {
            return arm;
        }
        let log_t = (t.max(1) as f64).ln();
        let mut best = 0;
        let mut best_index = f64::NEG_INFINITY;
        for (arm, (&pulls, &sum)) in self.pulls.iter().zip(&self.reward_sums).enumerate() {
            let n = pulls as f64;
            let index = sum / n + (self.gamma * log_t / (2.0 * n)).sqrt();
            // >= breaks ties toward the higher bid
            if index >= best_index {
                best_index = index;
                best = arm;
            }
        }
        best
    }
}

impl BiddingStrategy for DiscreteUcb {
    fn next_bid(&mut self, round: u64) -> f64 {
        self.last_arm = self.select(round);
        self.bid_of(self.last_arm)
    }

    fn update(&mut self, observation: Observation) {
        let utility = match observation {
            Observation::Won { value, payment } => {
                self.wins += 1;
                value - payment
            }
            Observation::Lost => 0.0,
        };
        self.pulls[self.last_arm] += 1;
        self.reward_sums[self.last_arm] += 0.5 * (utility + 1.0);
    }

    fn wins(&self) -> u64 {
        self.wins
    }
}

/// Bids the same amount every round.
#[derive(Debug, Clone)]
pub struct ConstantBid {
    bid: f64,
    wins: u64,
}

impl ConstantBid {
    pub fn new(bid: f64) -> Self {
        Self { bid, wins: 0 }
    }
}

impl BiddingStrategy for ConstantBid {
    fn next_bid(&mut self, _round: u64) -> f64 {
        self.bid
    }

    fn update(&mut self, observation: Observation) {
        if let Observation::Won { .. } = observation {
            self.wins += 1;
        }
    }

    fn wins(&self) -> u64 {
        self.wins
    }
}
