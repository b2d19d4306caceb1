//! Bernoulli KL divergence, its inversion into upper and lower confidence
//! bounds, and the Hoeffding and empirical-Bernstein exploration bonuses.

use crate::error::{Error, Result};

/// Stopping rule for the bisection that inverts the Bernoulli KL divergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlInversionConfig {
    /// Absolute tolerance on the returned bid, scaled by the local slope of
    /// `kl(p, ·)` so the divergence residual is also below it.
    pub tolerance: f64,
    pub max_iterations: u32,
}

impl Default for KlInversionConfig {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 100 }
    }
}

impl KlInversionConfig {
    pub fn new(tolerance: f64, max_iterations: u32) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::Config(format!("kl tolerance must be positive, got {tolerance}")));
        }
        if max_iterations == 0 {
            return Err(Error::Config("kl max_iterations must be at least 1".into()));
        }
        Ok(Self { tolerance, max_iterations })
    }
}

fn check_probability(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {x} is not in [0, 1]")))
    }
}

/// `kl(p, q) = p ln(p/q) + (1-p) ln((1-p)/(1-q))`, with `0 ln 0 = 0`.
pub fn bernoulli_kl(p: f64, q: f64) -> Result<f64> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    Ok(kl_unchecked(p, q))
}

/// Entropy-like part of `kl(p, ·)` that does not depend on `q`.
#[inline]
fn self_term(p: f64) -> f64 {
    let a = if p > 0.0 { p * p.ln() } else { 0.0 };
    let b = if p < 1.0 { (1.0 - p) * (-p).ln_1p() } else { 0.0 };
    a + b
}

/// `kl(p, q)` given `self_term(p)`, using `ln_1p` for the `1 - q` factor.
#[inline]
fn kl_with_self(p: f64, self_p: f64, q: f64) -> f64 {
    if p == q {
        return 0.0;
    }
    let a = if p > 0.0 {
        if q <= 0.0 {
            return f64::INFINITY;
        }
        p * q.ln()
    } else {
        0.0
    };
    let b = if p < 1.0 {
        if q >= 1.0 {
            return f64::INFINITY;
        }
        (1.0 - p) * (-q).ln_1p()
    } else {
        0.0
    };
    (self_p - a - b).max(0.0)
}

#[inline]
pub(crate) fn kl_unchecked(p: f64, q: f64) -> f64 {
    kl_with_self(p, self_term(p), q)
}

/// Derivative of `kl(p, ·)` at `q`.
#[inline]
fn kl_slope(p: f64, q: f64) -> f64 {
    ((q - p) / (q * (1.0 - q))).abs()
}

/// Largest `x` in `[p, 1]` with `kl(p, x) <= level`.
pub fn kl_ucb(p: f64, level: f64, cfg: &KlInversionConfig) -> Result<f64> {
    check_probability("p", p)?;
    check_level(level)?;
    Ok(kl_ucb_unchecked(p, level, cfg))
}

/// Smallest `x` in `[0, p]` with `kl(p, x) <= level`.
pub fn kl_lcb(p: f64, level: f64, cfg: &KlInversionConfig) -> Result<f64> {
    check_probability("p", p)?;
    check_level(level)?;
    Ok(kl_lcb_unchecked(p, level, cfg))
}

fn check_level(level: f64) -> Result<()> {
    if level >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("confidence level must be nonnegative, got {level}")))
    }
}

#[inline]
pub(crate) fn kl_ucb_unchecked(p: f64, level: f64, cfg: &KlInversionConfig) -> f64 {
    if level <= 0.0 || p >= 1.0 {
        return p;
    }
    let self_p = self_term(p);
    // Pinsker: kl(p, x) >= 2 (x - p)^2, so the root lies below p + sqrt(level / 2)
    let mut hi = (p + (0.5 * level).sqrt()).min(1.0);
    if kl_with_self(p, self_p, hi) <= level {
        return hi;
    }
    // kl(p, x) >= (1 - p) ln((1 - p) / (1 - x)) + p ln p bounds the gap 1 - x from below
    let gap = (1.0 - p) * (-(level - xlogx(p)) / (1.0 - p)).exp();
    hi = hi.min(1.0 - gap);
    let mut lo = p;
    for _ in 0..cfg.max_iterations {
        if (hi - lo) * kl_slope(p, hi).max(1.0) <= cfg.tolerance {
            break;
        }
        let (glo, ghi) = (1.0 - lo, 1.0 - hi);
        let mid = if ghi > 0.0 && glo > 2.0 * ghi { 1.0 - (glo * ghi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            return nearest_root(p, self_p, level, lo, hi);
        }
        if kl_with_self(p, self_p, mid) > level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

#[inline]
pub(crate) fn kl_lcb_unchecked(p: f64, level: f64, cfg: &KlInversionConfig) -> f64 {
    if level <= 0.0 || p <= 0.0 {
        return p;
    }
    let self_p = self_term(p);
    let mut lo = (p - (0.5 * level).sqrt()).max(0.0);
    if kl_with_self(p, self_p, lo) <= level {
        return lo;
    }
    // kl(p, x) >= p ln(p / x) + (1 - p) ln(1 - p) bounds the root from below
    lo = lo.max(p * (-(level - xlogx(1.0 - p)) / p).exp());
    let mut hi = p;
    for _ in 0..cfg.max_iterations {
        if (hi - lo) * kl_slope(p, lo).max(1.0) <= cfg.tolerance {
            break;
        }
        let mid = if lo > 0.0 && hi > 2.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            return nearest_root(p, self_p, level, lo, hi);
        }
        if kl_with_self(p, self_p, mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Endpoint of a bracket of adjacent floats whose divergence is closest to `level`.
#[inline]
fn nearest_root(p: f64, self_p: f64, level: f64, a: f64, b: f64) -> f64 {
    let ra = (kl_with_self(p, self_p, a) - level).abs();
    let rb = (kl_with_self(p, self_p, b) - level).abs();
    if ra <= rb {
        a
    } else {
        b
    }
}

#[inline]
fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Hoeffding bonus `sqrt(gamma ln(t) / (2 n))`.
///
/// # Panics
///
/// Panics when `n == 0`: strategies bid 1 until their first observation.
#[inline]
pub fn hoeffding_bonus(n: u64, t: u64, gamma: f64) -> f64 {
    assert!(n >= 1, "hoeffding_bonus needs at least one observation");
    (gamma * (t.max(1) as f64).ln() / (2.0 * n as f64)).sqrt()
}

/// Empirical-Bernstein bonus
/// `sqrt(2 W ln(3 t^gamma) / n) + 3 ln(3 t^gamma) / n`.
pub fn bernstein_bonus(variance: f64, n: u64, t: u64, gamma: f64) -> Result<f64> {
    if !(0.0..=0.25).contains(&variance) {
        return Err(Error::Domain(format!("empirical variance {variance} is outside [0, 1/4]")));
    }
    if n == 0 {
        return Err(Error::Domain("bernstein_bonus needs at least one observation".into()));
    }
    Ok(bernstein_bonus_unchecked(variance, n, t, gamma))
}

#[inline]
pub(crate) fn bernstein_bonus_unchecked(variance: f64, n: u64, t: u64, gamma: f64) -> f64 {
    let log_term = 3.0_f64.ln() + gamma * (t.max(1) as f64).ln();
    let n = n as f64;
    (2.0 * variance * log_term / n).sqrt() + 3.0 * log_term / n
}
