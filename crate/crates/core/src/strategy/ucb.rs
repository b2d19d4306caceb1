use super::{BiddingStrategy, RunningMoments};
use crate::confidence::{bernstein_bonus_unchecked, hoeffding_bonus, kl_ucb_unchecked, KlInversionConfig};
use crate::model::Observation;

/// `min(1, V̄ + sqrt(gamma ln t / (2 N)))`, or 1 before the first observation.
#[inline]
pub fn ucbid_next_bid(state: &RunningMoments, t: u64, gamma: f64) -> f64 {
    match state.mean() {
        None => 1.0,
        Some(mean) => (mean + hoeffding_bonus(state.count(), t, gamma)).min(1.0),
    }
}

/// Upper KL confidence bound of `V̄` at level `gamma ln t / N`, or 1 before
/// the first observation.
#[inline]
pub fn klucbid_next_bid(state: &RunningMoments, t: u64, gamma: f64, cfg: &KlInversionConfig) -> f64 {
    match state.mean() {
        None => 1.0,
        Some(mean) => {
            let level = gamma * (t.max(1) as f64).ln() / state.count() as f64;
            kl_ucb_unchecked(mean.clamp(0.0, 1.0), level, cfg)
        }
    }
}

/// `min(1, V̄ + sqrt(2 W̄ ln(3 t^gamma) / N) + 3 ln(3 t^gamma) / N)`, or 1
/// before the first observation.
#[inline]
pub fn bernstein_ucbid_next_bid(state: &RunningMoments, t: u64, gamma: f64) -> f64 {
    match (state.mean(), state.variance()) {
        (Some(mean), Some(var)) => (mean + bernstein_bonus_unchecked(var, state.count(), t, gamma)).min(1.0),
        _ => 1.0,
    }
}

macro_rules! moments_strategy {
    ($name:ident { $($field:ident : $ty:ty),* } => |$s:ident, $t:ident| $bid:expr) => {
        #[derive(Debug, Clone)]
        pub struct $name {
            $($field: $ty,)*
            moments: RunningMoments,
        }

        impl $name {
            pub fn moments(&self) -> &RunningMoments {
                &self.moments
            }
        }

        impl BiddingStrategy for $name {
            #[inline]
            fn next_bid(&mut self, $t: u64) -> f64 {
                let $s = &*self;
                $bid
            }

            #[inline]
            fn update(&mut self, observation: Observation) {
                if let Observation::Won { value, .. } = observation {
                    self.moments.push(value);
                }
            }

            fn wins(&self) -> u64 {
                self.moments.count()
            }
        }
    };
}

moments_strategy!(Ucbid { gamma: f64 } => |s, t| ucbid_next_bid(&s.moments, t, s.gamma));
moments_strategy!(KlUcbid { gamma: f64, cfg: KlInversionConfig }
    => |s, t| klucbid_next_bid(&s.moments, t, s.gamma, &s.cfg));
moments_strategy!(BernsteinUcbid { gamma: f64 }
    => |s, t| bernstein_ucbid_next_bid(&s.moments, t, s.gamma));

impl Ucbid {
    pub fn new(gamma: f64) -> Self {
        Self { gamma, moments: RunningMoments::new() }
    }
}

impl KlUcbid {
    pub fn new(gamma: f64, cfg: KlInversionConfig) -> Self {
        Self { gamma, cfg, moments: RunningMoments::new() }
    }
}

impl BernsteinUcbid {
    pub fn new(gamma: f64) -> Self {
        Self { gamma, moments: RunningMoments::new() }
    }
}
