use super::{BiddingStrategy, RunningMoments};
use crate::confidence::{kl_lcb_unchecked, kl_ucb_unchecked, KlInversionConfig};
use crate::error::{Error, Result};
use crate::model::Observation;

/// Which stopping rule ends exploration on the "go greedy" side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtgVariant {
    /// Stop once `exp(-n L(n) / 8) <= T^-2`, i.e. `n L(n) >= 16 ln T`.
    Analyzed,
    /// Stop once `n L(n) >= 2 ln T`.
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtgPhase {
    /// Bid 1 to force an observation every round.
    Explore,
    /// The upper confidence bound fell below `T^(-1/3)`: bid 0 forever.
    Abandon,
    /// The lower confidence bound certified the value: bid the running mean.
    Greedy,
}

/// Explore-then-greedy with data-driven stopping times.
///
/// Stopping conditions are checked on the observation count after every
/// update. During exploration every auction is won, so the count equals the
/// round index. When both conditions hold at once, abandoning wins.
#[derive(Debug, Clone)]
pub struct EtgStop {
    variant: EtgVariant,
    moments: RunningMoments,
    phase: EtgPhase,
    log_horizon: f64,
    abandon_below: f64,
    greedy_threshold: f64,
    stopped_at: Option<u64>,
    cfg: KlInversionConfig,
}

impl EtgStop {
    pub fn new(horizon: u64, variant: EtgVariant) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::Config("etgstop needs a horizon of at least 1".into()));
        }
        let log_horizon = (horizon as f64).ln();
        let greedy_threshold = match variant {
            EtgVariant::Analyzed => 16.0 * log_horizon,
            EtgVariant::Modified => 2.0 * log_horizon,
        };
        Ok(Self {
            variant,
            moments: RunningMoments::new(),
            phase: EtgPhase::Explore,
            log_horizon,
            abandon_below: (horizon as f64).powf(-1.0 / 3.0),
            greedy_threshold,
            stopped_at: None,
            cfg: KlInversionConfig::default(),
        })
    }

    pub fn variant(&self) -> EtgVariant {
        self.variant
    }

    pub fn phase(&self) -> EtgPhase {
        self.phase
    }

    /// Observation count at which exploration ended, if it has.
    pub fn stopped_at(&self) -> Option<u64> {
        self.stopped_at
    }

    pub fn moments(&self) -> &RunningMoments {
        &self.moments
    }

    fn check_stop(&mut self) {
        let (Some(mean), n) = (self.moments.mean(), self.moments.count()) else {
            return;
        };
        // confidence 1/T^2
        let level = 2.0 * self.log_horizon / n as f64;
        let upper = kl_ucb_unchecked(mean, level, &self.cfg);
        if upper <= self.abandon_below {
            self.phase = EtgPhase::Abandon;
            self.stopped_at = Some(n);
            return;
        }
        let lower = kl_lcb_unchecked(mean, level, &self.cfg);
        if n as f64 * lower >= self.greedy_threshold {
            self.phase = EtgPhase::Greedy;
            self.stopped_at = Some(n);
        }
    }
}

impl BiddingStrategy for EtgStop {
    #[inline]
    fn next_bid(&mut self, _round: u64) -> f64 {
        match self.phase {
            EtgPhase::Explore => 1.0,
            EtgPhase::Abandon => 0.0,
            EtgPhase::Greedy => self.moments.mean().unwrap_or(1.0),
        }
    }

    fn update(&mut self, observation: Observation) {
        if let Observation::Won { value, .. } = observation {
            self.moments.push(value);
            if self.phase == EtgPhase::Explore {
                self.check_stop();
            }
        }
    }

    fn wins(&self) -> u64 {
        self.moments.count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confidence::{kl_lcb, kl_ucb};

    fn feed(etg: &mut EtgStop, values: impl Iterator<Item = f64>, rounds: u64) -> Vec<f64> {
        let mut values = values;
        let mut bids = Vec::new();
        for t in 1..=rounds {
            let b = etg.next_bid(t);
            bids.push(b);
            let v = values.next().unwrap();
            // opponents bid 0.5 so bids of 1 and greedy bids >= 0.5 always win
            let outcome = crate::model::AuctionOutcome::settle(b, 0.5, v);
            etg.update(outcome.observation());
        }
        bids
    }

    /// First n with the scan condition, computed from the KL bounds directly.
    fn scan(horizon: u64, value: f64, pred: impl Fn(u64, f64, f64) -> bool) -> Option<u64> {
        let cfg = KlInversionConfig::default();
        (1..=horizon).find(|&n| {
            let level = 2.0 * (horizon as f64).ln() / n as f64;
            let u = kl_ucb(value, level, &cfg).unwrap();
            let l = kl_lcb(value, level, &cfg).unwrap();
            pred(n, u, l)
        })
    }

    #[test]
    fn all_zero_observations_abandon_at_38() {
        let t = 100;
        let cutoff = (t as f64).powf(-1.0 / 3.0);
        assert_eq!(scan(t, 0.0, |_, u, _| u <= cutoff), Some(38));

        let mut etg = EtgStop::new(t, EtgVariant::Analyzed).unwrap();
        let bids = feed(&mut etg, std::iter::repeat(0.0), t);
        assert!(bids[..38].iter().all(|&b| b == 1.0));
        assert!(bids[38..].iter().all(|&b| b == 0.0));
        assert_eq!(etg.phase(), EtgPhase::Abandon);
        assert_eq!(etg.stopped_at(), Some(38));
    }

    #[test]
    fn all_one_observations_go_greedy() {
        let t = 100;
        let ln_t = (t as f64).ln();
        let analyzed = scan(t, 1.0, |n, _, l| n as f64 * l >= 16.0 * ln_t).unwrap();
        let modified = scan(t, 1.0, |n, _, l| n as f64 * l >= 2.0 * ln_t).unwrap();
        assert_eq!((analyzed, modified), (83, 17));

        for (variant, stop) in [(EtgVariant::Analyzed, analyzed), (EtgVariant::Modified, modified)] {
            let mut etg = EtgStop::new(t, variant).unwrap();
            let bids = feed(&mut etg, std::iter::repeat(1.0), t);
            assert_eq!(etg.stopped_at(), Some(stop));
            assert_eq!(etg.phase(), EtgPhase::Greedy);
            assert!(bids.iter().all(|&b| b == 1.0));
        }
    }

    #[test]
    fn first_round_explores() {
        let mut etg = EtgStop::new(1000, EtgVariant::Modified).unwrap();
        assert_eq!(etg.next_bid(1), 1.0);
    }

    #[test]
    fn abandon_wins_simultaneous_firing() {
        // T = 1: ln T = 0, both conditions hold after the first observation
        let mut etg = EtgStop::new(1, EtgVariant::Modified).unwrap();
        etg.update(Observation::Won { value: 1.0, payment: 0.0 });
        assert_eq!(etg.phase(), EtgPhase::Abandon);
    }

    #[test]
    fn greedy_bids_track_running_mean() {
        let mut etg = EtgStop::new(50, EtgVariant::Modified).unwrap();
        let values = (0..).map(|i| if i % 4 == 0 { 0.0 } else { 1.0 });
        let bids = feed(&mut etg, values, 50);
        assert_eq!(etg.phase(), EtgPhase::Greedy);
        let k = etg.stopped_at().unwrap() as usize;
        assert!(bids[k..].iter().all(|&b| (0.5..1.0).contains(&b)));
    }
}
