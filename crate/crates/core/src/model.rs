//! Auction environment: value and opponent laws, the second-price settlement
//! rule with censored observation, and exact regret accounting.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};

const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// Serialized form of a [`ValueDistribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ValueLaw {
    Bernoulli { mean: f64 },
    TwoPoint { lo: f64, hi: f64, p_hi: f64 },
    FiniteSupport { points: Vec<(f64, f64)> },
}

/// Law of the item value `V_t`, restricted to finite support in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ValueLaw", into = "ValueLaw")]
pub struct ValueDistribution {
    law: ValueLaw,
    atoms: Vec<f64>,
    cumulative: Vec<f64>,
    mean: f64,
    variance: f64,
}

impl ValueDistribution {
    pub fn bernoulli(mean: f64) -> Result<Self> {
        Self::try_from(ValueLaw::Bernoulli { mean })
    }

    pub fn two_point(lo: f64, hi: f64, p_hi: f64) -> Result<Self> {
        Self::try_from(ValueLaw::TwoPoint { lo, hi, p_hi })
    }

    pub fn finite_support(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::try_from(ValueLaw::FiniteSupport { points })
    }

    pub fn law(&self) -> &ValueLaw {
        &self.law
    }

    /// Exact mean `v`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Exact variance `w`.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Inverse-CDF draw from a uniform `u` in `[0, 1)`.
    #[inline]
    pub fn sample_with(&self, u: f64) -> f64 {
        if let ValueLaw::Bernoulli { mean } = self.law {
            return if u < mean { 1.0 } else { 0.0 };
        }
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.atoms[idx.min(self.atoms.len() - 1)]
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_with(rng.random::<f64>())
    }
}

impl TryFrom<ValueLaw> for ValueDistribution {
    type Error = Error;

    fn try_from(law: ValueLaw) -> Result<Self> {
        let points = match &law {
            ValueLaw::Bernoulli { mean } => {
                check_prob("bernoulli mean", *mean)?;
                vec![(0.0, 1.0 - mean), (1.0, *mean)]
            }
            ValueLaw::TwoPoint { lo, hi, p_hi } => {
                check_prob("two-point p_hi", *p_hi)?;
                vec![(*lo, 1.0 - p_hi), (*hi, *p_hi)]
            }
            ValueLaw::FiniteSupport { points } => points.clone(),
        };
        if points.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut total = 0.0;
        for &(x, p) in &points {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidDistribution(format!("support point {x} outside [0, 1]")));
            }
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("negative probability {p}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}, not 1")));
        }

        let (mean, variance) = match law {
            ValueLaw::Bernoulli { mean } => (mean, mean * (1.0 - mean)),
            _ => {
                let mean: f64 = points.iter().map(|&(x, p)| x * p).sum();
                let variance = points.iter().map(|&(x, p)| p * (x - mean).powi(2)).sum();
                (mean, variance)
            }
        };

        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(points.len());
        for &(_, p) in &points {
            acc += p;
            cumulative.push(acc);
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Ok(Self { atoms: points.iter().map(|&(x, _)| x).collect(), cumulative, law, mean, variance })
    }
}

impl From<ValueDistribution> for ValueLaw {
    fn from(d: ValueDistribution) -> Self {
        d.law
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(format!("{name} = {p} is not a probability")))
    }
}

/// Serialized form of an [`OpponentDistribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpponentLaw {
    Uniform,
    /// Knots `(x, F(x))`, strictly increasing in `x`, from `(0, 0)` to `(1, 1)`.
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
    },
    PointMass {
        m: f64,
    },
}

/// Law of the maximal opponent bid `M_t`.
///
/// Piecewise-linear CDFs keep the CDF, its integral, the density bounds and
/// inverse-CDF sampling all exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OpponentLaw", into = "OpponentLaw")]
pub struct OpponentDistribution {
    law: OpponentLaw,
    xs: Vec<f64>,
    fs: Vec<f64>,
    // integral of F from 0 to xs[i]
    prefix: Vec<f64>,
}

impl OpponentDistribution {
    pub fn uniform() -> Self {
        Self { law: OpponentLaw::Uniform, xs: vec![0.0, 1.0], fs: vec![0.0, 1.0], prefix: vec![0.0, 0.5] }
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::try_from(OpponentLaw::PiecewiseLinear { knots })
    }

    pub fn point_mass(m: f64) -> Result<Self> {
        Self::try_from(OpponentLaw::PointMass { m })
    }

    pub fn law(&self) -> &OpponentLaw {
        &self.law
    }

    fn segment(&self, x: f64) -> usize {
        // index i with xs[i] <= x < xs[i + 1], clamped to the last segment
        let i = self.xs.partition_point(|&k| k <= x);
        i.saturating_sub(1).min(self.xs.len() - 2)
    }

    /// `F(x) = P(M <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.law {
            OpponentLaw::Uniform => x.clamp(0.0, 1.0),
            OpponentLaw::PointMass { m } => {
                if x >= m {
                    1.0
                } else {
                    0.0
                }
            }
            OpponentLaw::PiecewiseLinear { .. } => {
                if x <= 0.0 {
                    return 0.0;
                }
                if x >= 1.0 {
                    return 1.0;
                }
                let i = self.segment(x);
                let (x0, x1, f0, f1) = (self.xs[i], self.xs[i + 1], self.fs[i], self.fs[i + 1]);
                f0 + (f1 - f0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// `G(x) = ∫_0^x F(m) dm` for `x` in `[0, 1]`.
    pub fn integrated_cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self.law {
            OpponentLaw::Uniform => 0.5 * x * x,
            OpponentLaw::PointMass { m } => (x - m).max(0.0),
            OpponentLaw::PiecewiseLinear { .. } => {
                let i = self.segment(x);
                self.prefix[i] + 0.5 * (x - self.xs[i]) * (self.fs[i] + self.cdf(x))
            }
        }
    }

    /// Inverse-CDF draw from a uniform `u` in `[0, 1)`.
    #[inline]
    pub fn sample_with(&self, u: f64) -> f64 {
        match self.law {
            OpponentLaw::Uniform => u,
            OpponentLaw::PointMass { m } => m,
            OpponentLaw::PiecewiseLinear { .. } => {
                // first knot with F > u; flat segments are never selected
                let j = self.fs.partition_point(|&f| f <= u).clamp(1, self.fs.len() - 1);
                let (x0, x1, f0, f1) = (self.xs[j - 1], self.xs[j], self.fs[j - 1], self.fs[j]);
                x0 + (u - f0) / (f1 - f0) * (x1 - x0)
            }
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_with(rng.random::<f64>())
    }

    /// Smallest and largest density on `[a, b]`, or `None` when `M` has an atom.
    pub fn density_range(&self, a: f64, b: f64) -> Option<(f64, f64)> {
        if let OpponentLaw::PointMass { .. } = self.law {
            return None;
        }
        let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        let (lo, hi) = (a.min(b), a.max(b));
        let mut min = f64::INFINITY;
        let mut max = 0.0_f64;
        for i in 0..self.xs.len() - 1 {
            let (x0, x1) = (self.xs[i], self.xs[i + 1]);
            let overlaps = if lo == hi { x0 <= lo && lo <= x1 } else { x0 < hi && lo < x1 };
            if overlaps {
                let slope = (self.fs[i + 1] - self.fs[i]) / (x1 - x0);
                min = min.min(slope);
                max = max.max(slope);
            }
        }
        Some((min, max))
    }

    /// Expected regret of bidding `b` instead of `v` in one round,
    /// `∫_b^v (F(m) - F(b)) dm`. Inputs are assumed to be in `[0, 1]`.
    #[inline]
    pub fn round_regret(&self, b: f64, v: f64) -> f64 {
        match self.law {
            OpponentLaw::Uniform => 0.5 * (b - v) * (b - v),
            OpponentLaw::PiecewiseLinear { .. } if self.segment(b) == self.segment(v) => {
                let i = self.segment(b);
                let slope = (self.fs[i + 1] - self.fs[i]) / (self.xs[i + 1] - self.xs[i]);
                0.5 * slope * (b - v) * (b - v)
            }
            _ => {
                let fb = self.cdf(b);
                let r = if b <= v {
                    self.integrated_cdf(v) - self.integrated_cdf(b) - (v - b) * fb
                } else {
                    (b - v) * fb - (self.integrated_cdf(b) - self.integrated_cdf(v))
                };
                r.max(0.0)
            }
        }
    }
}

impl TryFrom<OpponentLaw> for OpponentDistribution {
    type Error = Error;

    fn try_from(law: OpponentLaw) -> Result<Self> {
        match law {
            OpponentLaw::Uniform => Ok(Self::uniform()),
            OpponentLaw::PointMass { m } => {
                if !(0.0..=1.0).contains(&m) {
                    return Err(Error::InvalidDistribution(format!("point mass {m} outside [0, 1]")));
                }
                Ok(Self { law, xs: vec![0.0, 1.0], fs: vec![0.0, 1.0], prefix: vec![0.0, 0.0] })
            }
            OpponentLaw::PiecewiseLinear { ref knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidDistribution("need at least two knots".into()));
                }
                if knots[0] != (0.0, 0.0) || knots[knots.len() - 1] != (1.0, 1.0) {
                    return Err(Error::InvalidDistribution(
                        "knots must start at (0, 0) and end at (1, 1)".into(),
                    ));
                }
                for w in knots.windows(2) {
                    let ((x0, f0), (x1, f1)) = (w[0], w[1]);
                    if !(x1 > x0) {
                        return Err(Error::InvalidDistribution(format!(
                            "knot abscissae not strictly increasing at {x0} -> {x1}"
                        )));
                    }
                    if !(f1 >= f0) || !(0.0..=1.0).contains(&f1) {
                        return Err(Error::InvalidDistribution(format!(
                            "CDF not nondecreasing in [0, 1] at x = {x1}"
                        )));
                    }
                }
                let xs: Vec<f64> = knots.iter().map(|k| k.0).collect();
                let fs: Vec<f64> = knots.iter().map(|k| k.1).collect();
                let mut prefix = vec![0.0; xs.len()];
                for i in 1..xs.len() {
                    prefix[i] = prefix[i - 1] + 0.5 * (xs[i] - xs[i - 1]) * (fs[i] + fs[i - 1]);
                }
                Ok(Self { law, xs, fs, prefix })
            }
        }
    }
}

impl From<OpponentDistribution> for OpponentLaw {
    fn from(d: OpponentDistribution) -> Self {
        d.law
    }
}

/// What a strategy is allowed to see after a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    Won { value: f64, payment: f64 },
    Lost,
}

/// Result of one second-price auction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuctionOutcome {
    observation: Observation,
    max_bid: f64,
}

impl AuctionOutcome {
    #[inline]
    pub(crate) fn settle(bid: f64, max_bid: f64, item_value: f64) -> Self {
        let observation = if max_bid <= bid {
            Observation::Won { value: item_value, payment: max_bid }
        } else {
            Observation::Lost
        };
        Self { observation, max_bid }
    }

    pub fn won(&self) -> bool {
        matches!(self.observation, Observation::Won { .. })
    }

    pub fn payment(&self) -> Option<f64> {
        match self.observation {
            Observation::Won { payment, .. } => Some(payment),
            Observation::Lost => None,
        }
    }

    pub fn observed_value(&self) -> Option<f64> {
        match self.observation {
            Observation::Won { value, .. } => Some(value),
            Observation::Lost => None,
        }
    }

    /// The censored view handed to strategies.
    #[inline]
    pub fn observation(&self) -> Observation {
        self.observation
    }

    /// Highest opponent bid. Kept for regret accounting only.
    pub fn max_bid(&self) -> f64 {
        self.max_bid
    }

    /// Realized utility `(V - M) 1{won}`.
    pub fn utility(&self) -> f64 {
        match self.observation {
            Observation::Won { value, payment } => value - payment,
            Observation::Lost => 0.0,
        }
    }
}

/// Settles one auction. Ties go to the bidder.
pub fn play_round(bid: f64, max_bid: f64, item_value: f64) -> Result<AuctionOutcome> {
    check_unit("bid", bid)?;
    check_unit("max_bid", max_bid)?;
    check_unit("item_value", item_value)?;
    Ok(AuctionOutcome::settle(bid, max_bid, item_value))
}

/// Expected utility of bidding the mean value `v` for `horizon` rounds,
/// `T · E[(v - M) 1{M <= v}] = T · ∫_0^v F`.
pub fn optimal_cumulative_utility(value_mean: f64, opp: &OpponentDistribution, horizon: u64) -> Result<f64> {
    check_unit("value_mean", value_mean)?;
    Ok(horizon as f64 * opp.integrated_cdf(value_mean))
}

/// Expected one-round regret of bidding `bid` when the value mean is `value_mean`.
pub fn expected_round_regret(bid: f64, value_mean: f64, opp: &OpponentDistribution) -> Result<f64> {
    check_unit("bid", bid)?;
    check_unit("value_mean", value_mean)?;
    Ok(opp.round_regret(bid, value_mean))
}
