//! Closed-form regret bounds and the constants they depend on.
//!
//! Upper bounds are stated under a margin condition
//! `F(x) - F(v) <= beta (x - v)^alpha` to the right of `v`; `alpha = 1`
//! is the bounded-density case. Every evaluator returns the bound on the
//! expected cumulative regret after `horizon` rounds unless noted.

use std::f64::consts::E;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{OpponentDistribution, ValueDistribution};
use crate::simulator::format_sig;
use crate::strategy::{DEFAULT_BERNSTEIN_GAMMA, DEFAULT_UCB_GAMMA};

/// Terms summed explicitly before switching to Euler-Maclaurin.
const DIRECT_TERMS: u64 = 1_000_000;
const ZETA_TERMS: u64 = 1_000;

/// Parameters of a bound: the environment summary, the margin condition,
/// the exploration parameter and the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    /// Value mean.
    pub v: f64,
    /// Value variance.
    pub w: f64,
    /// `F(v)`.
    pub fv: f64,
    /// `F(v / 2)`, used by the ETG bound.
    pub f_half_v: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Lower bound on the opponent density.
    pub beta_lower: f64,
    /// Width of a localized margin condition; `None` when it holds on `[v, 1]`.
    pub delta: Option<f64>,
    pub gamma: f64,
    pub horizon: u64,
}

impl ProblemParams {
    /// Parameters of a concrete environment with `alpha = 1`: `beta` is the
    /// largest opponent density on `[v, 1]` and `beta_lower` the smallest on `[0, 1]`.
    pub fn from_environment(
        value: &ValueDistribution,
        opponent: &OpponentDistribution,
        gamma: f64,
        horizon: u64,
    ) -> Result<Self> {
        let v = value.mean();
        let (_, beta) = opponent
            .density_range(v, 1.0)
            .ok_or_else(|| Error::BoundPrecondition("opponent law has an atom, no density bound".into()))?;
        let (beta_lower, _) = opponent.density_range(0.0, 1.0).unwrap_or((0.0, 0.0));
        let params = Self {
            v,
            w: value.variance(),
            fv: opponent.cdf(v),
            f_half_v: opponent.cdf(v / 2.0),
            alpha: 1.0,
            beta,
            beta_lower,
            delta: None,
            gamma,
            horizon,
        };
        params.validate()?;
        Ok(params)
    }

    /// Uniform opponents: `F(x) = x`, `beta = beta_lower = 1`.
    pub fn uniform(v: f64, w: f64, gamma: f64, horizon: u64) -> Result<Self> {
        let params = Self {
            v,
            w,
            fv: v,
            f_half_v: v / 2.0,
            alpha: 1.0,
            beta: 1.0,
            beta_lower: 1.0,
            delta: None,
            gamma,
            horizon,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_horizon(&self, horizon: u64) -> Self {
        Self { horizon, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::BoundPrecondition(msg));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.v) {
            return fail(format!("v = {} is outside [0, 1]", self.v));
        }
        if !(0.0..=self.v * (1.0 - self.v) + 1e-12).contains(&self.w) {
            return fail(format!("w = {} is outside [0, v(1 - v)]", self.w));
        }
        if !unit(self.fv) || !unit(self.f_half_v) {
            return fail("F(v) and F(v/2) must lie in [0, 1]".into());
        }
        if !(self.alpha > 0.0 && self.beta > 0.0 && self.beta_lower >= 0.0) {
            return fail("alpha and beta must be positive and beta_lower nonnegative".into());
        }
        if let Some(d) = self.delta {
            if !(d > 0.0) {
                return fail(format!("delta = {d} must be positive"));
            }
        }
        if !(self.gamma > 0.0) {
            return fail(format!("gamma = {} must be positive", self.gamma));
        }
        if self.horizon < 1 {
            return fail("horizon must be at least 1".into());
        }
        Ok(())
    }

    fn log_t(&self) -> f64 {
        (self.horizon as f64).ln()
    }

    fn require_fv(&self) -> Result<f64> {
        if self.fv > 0.0 {
            Ok(self.fv)
        } else {
            Err(Error::BoundPrecondition("F(v) must be positive".into()))
        }
    }

    fn require_gamma_above(&self, min: f64) -> Result<()> {
        if self.gamma > min {
            Ok(())
        } else {
            Err(Error::BoundPrecondition(format!("gamma must exceed {min}, got {}", self.gamma)))
        }
    }

    /// Localized margin width, if it is narrower than `[v, 1]`.
    fn localized_delta(&self) -> Option<f64> {
        self.delta.filter(|&d| self.v + d < 1.0)
    }
}

/// `sum_{t <= horizon} f(t)`: exact up to `DIRECT_TERMS`, then Euler-Maclaurin
/// with the antiderivative `big_f` and derivative `df`.
fn partial_sum(
    horizon: u64,
    f: impl Fn(f64) -> f64,
    big_f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
) -> f64 {
    if horizon <= DIRECT_TERMS {
        return (1..=horizon).rev().map(|t| f(t as f64)).sum();
    }
    let n = DIRECT_TERMS as f64;
    let t = horizon as f64;
    let head: f64 = (1..DIRECT_TERMS).rev().map(|k| f(k as f64)).sum();
    head + big_f(t) - big_f(n) + 0.5 * (f(n) + f(t)) + (df(t) - df(n)) / 12.0
}

/// `C_gamma = sum_{t=1}^{T} e sqrt(gamma) (ln t + 1) / t^gamma`.
pub fn c_gamma(gamma: f64, horizon: u64) -> Result<f64> {
    if !(gamma > 1.0) {
        return Err(Error::BoundPrecondition(format!("C_gamma needs gamma > 1, got {gamma}")));
    }
    let k = E * gamma.sqrt();
    let g = 1.0 - gamma;
    let sum = partial_sum(
        horizon,
        |t| (t.ln() + 1.0) * t.powf(-gamma),
        // ∫ (ln t + 1) t^-gamma dt
        |t| t.powf(g) * ((t.ln() + 1.0) / g - 1.0 / (g * g)),
        |t| t.powf(-gamma - 1.0) * (1.0 - gamma * (t.ln() + 1.0)),
    );
    Ok(k * sum)
}

/// `C'_gamma = sum_{t=1}^{T} t^(1 - gamma)`.
pub fn c_gamma_prime(gamma: f64, horizon: u64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::BoundPrecondition(format!("C'_gamma needs gamma > 0, got {gamma}")));
    }
    let s = gamma - 1.0;
    Ok(partial_sum(
        horizon,
        |t| t.powf(-s),
        |t| if (s - 1.0).abs() < 1e-12 { t.ln() } else { t.powf(1.0 - s) / (1.0 - s) },
        |t| -s * t.powf(-s - 1.0),
    ))
}

/// Riemann zeta `sum_{n >= 1} n^-s` for `s > 1`.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::BoundPrecondition(format!("zeta needs s > 1, got {s}")));
    }
    let n = ZETA_TERMS as f64;
    let head: f64 = (1..ZETA_TERMS).rev().map(|k| (k as f64).powf(-s)).sum();
    // Euler-Maclaurin tail from N; the next correction is below 1e-15
    let tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0;
    Ok(head + tail)
}

/// `c_1 = zeta(1 + alpha)`.
pub fn c1(alpha: f64) -> Result<f64> {
    zeta(1.0 + alpha)
}

/// Non-asymptotic UCBID bound, by margin exponent.
pub fn ucbid_bound(p: &ProblemParams) -> Result<f64> {
    p.validate()?;
    p.require_gamma_above(1.0)?;
    let fv = p.require_fv()?;
    let (a, l, t) = (p.alpha, p.log_t(), p.horizon as f64);
    let scale = p.beta / fv;
    let margin = if a < 1.0 {
        2.0 * (p.gamma * l).powf((1.0 + a) / 2.0) / (1.0 - a) * (t.powf((1.0 - a) / 2.0) + 1.0) + 1.0
    } else if a == 1.0 {
        2.0 * p.gamma * l * (l + 1.0) + 1.0
    } else {
        6.0 * p.gamma * l / (a - 1.0) + 1.0
    };
    let localized = p.localized_delta().map_or(0.0, |d| 2.0 * p.gamma * l / (d * d) + 1.0);
    Ok(c_gamma(p.gamma, p.horizon)? + scale * margin + localized)
}

/// Non-asymptotic Bernstein-UCBID bound, by margin exponent.
pub fn bernstein_bound(p: &ProblemParams) -> Result<f64> {
    p.validate()?;
    p.require_gamma_above(2.0)?;
    let fv = p.require_fv()?;
    let (a, l, t) = (p.alpha, p.log_t(), p.horizon as f64);
    let lg = 3f64.ln() + p.gamma * l;
    let scale = p.beta / fv;
    let deviation = || -> Result<f64> { Ok(scale * ((6.0 * c1(a)? * lg).powf(1.0 + a) + 1.0)) };
    let margin = if a < 1.0 {
        scale * (8.0 * p.w * lg).powf((1.0 + a) / 2.0) * 2.0 / (1.0 - a) * (t.powf((1.0 - a) / 2.0) + 1.0)
            + deviation()?
    } else if a == 1.0 {
        scale * 8.0 * p.w * lg * (l + 1.0) + deviation()?
    } else {
        scale * (8.0 * p.w * (a + 1.0) / (a - 1.0) + 1.0 / a) * lg
    };
    let localized = p.localized_delta().map_or(0.0, |d| (12.0 / d + 32.0 / (d * d)) * lg + 1.0);
    Ok(c_gamma_prime(p.gamma, p.horizon)? + margin + localized)
}

/// Non-asymptotic kl-UCBID bound under a margin condition on `[v, 1]`.
pub fn klucbid_nonasymptotic_bound(p: &ProblemParams) -> Result<f64> {
    p.validate()?;
    p.require_gamma_above(1.0)?;
    let fv = p.require_fv()?;
    let (a, l, t, v) = (p.alpha, p.log_t(), p.horizon as f64, p.v);
    let base = 1.0 + c_gamma(p.gamma, p.horizon)? + l + 2.0 * p.gamma.sqrt() * l;
    let scale = p.beta / fv;
    let k = 6.0 + 4.0 * p.gamma;
    let margin = if a == 1.0 {
        scale * k * k * v * l * l
    } else if a < 1.0 {
        scale * k.powf(1.0 + a) * 2.0 / (1.0 - a)
            * v.powf((1.0 + a) / 2.0)
            * l.powf((1.0 + a) / 2.0)
            * t.powf((1.0 - a) / 2.0)
            + 5.0 * l * l
    } else {
        scale * k.powf(1.0 + a) * 2.0 / (a - 1.0) * v.powf((1.0 + a) / 2.0) * l + 5.0 * l * l
    };
    Ok(base + margin)
}

/// Leading term `2 beta gamma ln^2 T / F(v)` of the UCBID bound.
pub fn ucbid_asymptotic_leading(p: &ProblemParams) -> Result<f64> {
    p.validate()?;
    let l = p.log_t();
    Ok(2.0 * p.beta * p.gamma * l * l / p.require_fv()?)
}

/// Leading term `8 gamma v (1 - v) beta ln^2 T / F(v)` of the kl-UCBID bound.
pub fn klucbid_asymptotic_leading(p: &ProblemParams) -> Result<f64> {
    p.validate()?;
    let l = p.log_t();
    Ok(8.0 * p.gamma * p.v * (1.0 - p.v) * p.beta * l * l / p.require_fv()?)
}

/// Leading term `8 beta w gamma ln^2 T / F(v)` of the Bernstein-UCBID bound.
pub fn bernstein_asymptotic_leading(p: &ProblemParams) -> Result<f64> {
    p.validate()?;
    let l = p.log_t();
    Ok(8.0 * p.beta * p.w * p.gamma * l * l / p.require_fv()?)
}

/// ETGstop bound `7 + (64 ln T + 60 T^-1/2) / v + 4 / F(v/2) + beta ln^2 T / F(v/2)`,
/// valid for `v > T^(-1/3)`.
pub fn etgstop_bound(p: &ProblemParams) -> Result<f64> {
    p.validate()?;
    let t = p.horizon as f64;
    let cutoff = t.powf(-1.0 / 3.0);
    if !(p.v > cutoff) {
        return Err(Error::BoundPrecondition(format!(
            "ETGstop bound needs v > T^(-1/3) = {cutoff}, got v = {}",
            p.v
        )));
    }
    if !(p.f_half_v > 0.0) {
        return Err(Error::BoundPrecondition("F(v/2) must be positive".into()));
    }
    let l = p.log_t();
    Ok(7.0 + (64.0 * l + 60.0 / t.sqrt()) / p.v + 4.0 / p.f_half_v + p.beta * l * l / p.f_half_v)
}

/// Asymptotic lower bound on `R_T / ln T` for optimistic strategies,
/// `beta_lower v (1 - v) / (16 F(v))`.
pub fn optimistic_lower_bound(p: &ProblemParams) -> Result<f64> {
    p.validate()?;
    Ok(p.beta_lower * p.v * (1.0 - p.v) / (16.0 * p.require_fv()?))
}

/// Worst-case lower bound `beta_lower (T^(1/3) - 1) / 4` for ETG strategies.
pub fn etg_minimax_lower_bound(beta_lower: f64, horizon: u64) -> Result<f64> {
    if horizon < 1 || !(beta_lower >= 0.0) {
        return Err(Error::BoundPrecondition("need horizon >= 1 and beta_lower >= 0".into()));
    }
    Ok(beta_lower * ((horizon as f64).cbrt() - 1.0) / 4.0)
}

/// Orders of the worst-case regret over `v`, with unit constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorstCaseOrder {
    /// `sqrt(T) ln T`
    Ucbid,
    /// `T^(1/3) ln^2 T`
    Bernstein,
    /// `ln^2 T`
    Klucbid,
    /// `T^(1/3) ln^2 T`
    Etgstop,
}

impl WorstCaseOrder {
    pub fn eval(self, horizon: u64) -> f64 {
        let t = horizon as f64;
        let l = t.ln();
        match self {
            Self::Ucbid => t.sqrt() * l,
            Self::Bernstein | Self::Etgstop => t.cbrt() * l * l,
            Self::Klucbid => l * l,
        }
    }
}

/// One line of a bound table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub name: &'static str,
    pub v: f64,
    pub horizon: u64,
    pub value: f64,
    /// Leading terms and order functions, as opposed to finite-horizon bounds.
    pub asymptotic: bool,
}

/// Exploration parameters of the three UCB-type strategies, one per bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundGammas {
    pub ucbid: f64,
    pub klucbid: f64,
    pub bernstein: f64,
}

impl Default for BoundGammas {
    fn default() -> Self {
        Self { ucbid: DEFAULT_UCB_GAMMA, klucbid: DEFAULT_UCB_GAMMA, bernstein: DEFAULT_BERNSTEIN_GAMMA }
    }
}

/// Every bound whose preconditions hold at `p`, each evaluated with the
/// exploration parameter of its own strategy.
pub fn bound_table(p: &ProblemParams, gammas: &BoundGammas) -> Vec<BoundRow> {
    type Eval = fn(&ProblemParams) -> Result<f64>;
    let evals: [(&'static str, Eval, f64, bool); 9] = [
        ("ucbid", ucbid_bound, gammas.ucbid, false),
        ("bernstein_ucbid", bernstein_bound, gammas.bernstein, false),
        ("klucbid", klucbid_nonasymptotic_bound, gammas.klucbid, false),
        ("etgstop", etgstop_bound, p.gamma, false),
        ("etg_minimax_lower", |p| etg_minimax_lower_bound(p.beta_lower, p.horizon), p.gamma, false),
        ("ucbid_leading", ucbid_asymptotic_leading, gammas.ucbid, true),
        ("klucbid_leading", klucbid_asymptotic_leading, gammas.klucbid, true),
        ("bernstein_ucbid_leading", bernstein_asymptotic_leading, gammas.bernstein, true),
        ("optimistic_lower_rate", |p| Ok(optimistic_lower_bound(p)? * p.log_t()), p.gamma, true),
    ];
    let mut rows: Vec<BoundRow> = evals
        .iter()
        .filter_map(|&(name, f, gamma, asymptotic)| {
            let q = ProblemParams { gamma, ..p.clone() };
            f(&q).ok().map(|value| BoundRow { name, v: p.v, horizon: p.horizon, value, asymptotic })
        })
        .collect();
    for (name, order) in [
        ("ucbid_worst_case_order", WorstCaseOrder::Ucbid),
        ("bernstein_ucbid_worst_case_order", WorstCaseOrder::Bernstein),
        ("klucbid_worst_case_order", WorstCaseOrder::Klucbid),
        ("etgstop_worst_case_order", WorstCaseOrder::Etgstop),
    ] {
        rows.push(BoundRow {
            name,
            v: p.v,
            horizon: p.horizon,
            value: order.eval(p.horizon),
            asymptotic: true,
        });
    }
    rows
}

pub const BOUND_CSV_HEADER: &str = "bound_name,v,T,value,asymptotic_flag";

pub fn write_bound_csv<W: Write>(rows: &[BoundRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{BOUND_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.name,
            format_sig(r.v),
            r.horizon,
            format_sig(r.value),
            r.asymptotic
        )?;
    }
    Ok(())
}
