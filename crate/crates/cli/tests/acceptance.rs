//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process exits nonzero when any check fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucbid_cli::Preset;
use ucbid_core::bounds::{ucbid_bound, ProblemParams};
use ucbid_core::strategy::{klucbid_next_bid, ucbid_next_bid};
use ucbid_core::{
    bernoulli_kl, kl_lcb, kl_ucb, run_experiment, win_rate_curve, ExperimentConfig, KlInversionConfig,
    Parallelism, RegretEstimator, RegretTrajectory, RunningMoments, StrategySpec, ValueDistribution,
};

/// Required separation between means, in combined standard errors.
const SEPARATION_SE: f64 = 2.0;
/// Largest allowed gap between the two regret estimators, in combined standard errors.
const ESTIMATOR_SE: f64 = 4.0;
const LINEAR_RATIO: (f64, f64) = (1.7, 2.3);
const SUBLINEAR_RATIO: f64 = 1.6;
const WIN_RATE_BAND: (f64, f64) = (0.30, 0.40);
const ROUND_TRIP_TOLERANCE: f64 = 1e-8;
const OPTIMISM_STATES: usize = 10_000;

type Check = Result<String, String>;
type NamedCheck = (&'static str, fn() -> Check);

fn experiment(preset: Preset, trials: u64) -> ExperimentConfig {
    let mut cfg = preset.config();
    cfg.trials = trials;
    cfg.to_experiment().unwrap()
}

fn run(cfg: &ExperimentConfig) -> RegretTrajectory {
    run_experiment(cfg, Parallelism::Auto).unwrap()
}

/// `(mean, stderr)` of `strategy` at round `t`.
fn at(traj: &RegretTrajectory, strategy: &str, t: u64) -> (f64, f64) {
    let p = traj.curve(strategy).and_then(|c| c.at(t)).unwrap_or_else(|| panic!("{strategy} at {t}"));
    (p.mean_regret, p.stderr)
}

/// `a` below `b` by at least `k` combined standard errors.
fn below(a: (f64, f64), b: (f64, f64), k: f64) -> bool {
    b.0 - a.0 >= k * (a.1 * a.1 + b.1 * b.1).sqrt()
}

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fig1a_ordering() -> Check {
    let traj = run(&experiment(Preset::Fig1a, 2000));
    let kl = at(&traj, "klucbid", 10_000);
    let ucb = at(&traj, "ucbid", 10_000);
    let bern = at(&traj, "bernstein_ucbid", 10_000);
    verdict(
        below(kl, ucb, SEPARATION_SE) && below(ucb, bern, SEPARATION_SE),
        format!(
            "klucbid {:.3}±{:.3} < ucbid {:.3}±{:.3} < bernstein {:.3}±{:.3}",
            kl.0, kl.1, ucb.0, ucb.1, bern.0, bern.1
        ),
    )
}

fn fig1b_crossover() -> Check {
    let traj = run(&experiment(Preset::Fig1b, 500));
    let (ucb_late, bern_late) = (at(&traj, "ucbid", 100_000), at(&traj, "bernstein_ucbid", 100_000));
    let (ucb_early, bern_early) = (at(&traj, "ucbid", 1_000), at(&traj, "bernstein_ucbid", 1_000));
    verdict(
        below(bern_late, ucb_late, SEPARATION_SE) && ucb_early.0 < bern_early.0,
        format!(
            "t=1e5: bernstein {:.3}±{:.3} < ucbid {:.3}±{:.3}; t=1e3: ucbid {:.3} < bernstein {:.3}",
            bern_late.0, bern_late.1, ucb_late.0, ucb_late.1, ucb_early.0, bern_early.0
        ),
    )
}

fn fig1c_linear_baselines() -> Check {
    let traj = run(&experiment(Preset::Fig1c, 500));
    let ratio = |s: &str| at(&traj, s, 10_000).0 / at(&traj, s, 5_000).0;
    let mut ok = true;
    let mut parts = Vec::new();
    for s in ["greedy", "discrete_ucb"] {
        let r = ratio(s);
        ok &= (LINEAR_RATIO.0..=LINEAR_RATIO.1).contains(&r);
        parts.push(format!("{s} ratio {r:.3}"));
    }
    for s in ["ucbid", "klucbid", "bernstein_ucbid"] {
        let r = ratio(s);
        ok &= r < SUBLINEAR_RATIO;
        for baseline in ["greedy", "discrete_ucb"] {
            ok &= below(at(&traj, s, 10_000), at(&traj, baseline, 10_000), SEPARATION_SE);
        }
        parts.push(format!("{s} ratio {r:.3}"));
    }
    verdict(ok, parts.join(", "))
}

fn fig1d_shape() -> Check {
    let cfg = Preset::Fig1d.config();
    let mut etg = Vec::new();
    let mut kl = Vec::new();
    for (v, exp) in cfg.sweep_experiments().unwrap() {
        let traj = run(&exp);
        etg.push((v, at(&traj, "etgstop_modified", 5_000)));
        kl.push((v, at(&traj, "klucbid", 5_000)));
    }
    let peak = etg.iter().max_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).unwrap().0;
    let target = 5_000f64.powf(-1.0 / 3.0);
    let mut by_distance: Vec<f64> = etg.iter().map(|e| e.0).collect();
    by_distance.sort_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
    let peak_ok = by_distance[..3].contains(&peak);
    let wins_high = [0.95, 0.9].iter().any(|&v| {
        let e = etg.iter().find(|p| (p.0 - v).abs() < 1e-12).unwrap().1;
        let k = kl.iter().find(|p| (p.0 - v).abs() < 1e-12).unwrap().1;
        below(e, k, SEPARATION_SE)
    });
    let top = |xs: &[(f64, (f64, f64))]| xs.last().map(|p| p.1 .0).unwrap();
    verdict(
        peak_ok && wins_high,
        format!(
            "etgstop_modified peak at v={peak} (nearest to {target:.4}: {:?}); at v=0.95 etg {:.3} vs klucbid {:.3}",
            &by_distance[..3],
            top(&etg),
            top(&kl)
        ),
    )
}

fn ucbid_bound_holds() -> Check {
    let mut cfg = experiment(Preset::Fig1a, 2000);
    cfg.strategies = vec![StrategySpec::Ucbid { gamma: 2.0 }];
    let traj = run(&cfg);
    let (mean, _) = at(&traj, "ucbid", 10_000);
    let params = ProblemParams::from_environment(&cfg.value, &cfg.opponent, 2.0, 10_000).unwrap();
    let bound = ucbid_bound(&params).unwrap();
    verdict(mean <= bound, format!("simulated {mean:.3} <= bound {bound:.3} (slack {:.1}x)", bound / mean))
}

fn oracle_zero_regret() -> Check {
    let mut cfg = experiment(Preset::Fig1a, 200);
    cfg.strategies = vec![StrategySpec::Constant { bid: cfg.value.mean() }];
    let traj = run(&cfg);
    let worst = traj.curves[0].points.iter().map(|p| p.mean_regret).fold(0.0, f64::max);
    verdict(
        worst == 0.0,
        format!("max mean regret over {} checkpoints = {worst}", traj.curves[0].points.len()),
    )
}

fn win_rate_limit() -> Check {
    let mut cfg = experiment(Preset::Fig1a, 2000);
    cfg.value = ValueDistribution::bernoulli(0.3).unwrap();
    cfg.strategies = vec![StrategySpec::klucbid()];
    let traj = run(&cfg);
    let curve = win_rate_curve(&traj.curves[0]);
    let last3: Vec<f64> = curve[curve.len() - 3..].iter().map(|p| p.1).collect();
    let final_rate = last3[2];
    verdict(
        (WIN_RATE_BAND.0..=WIN_RATE_BAND.1).contains(&final_rate)
            && last3[0] > last3[1]
            && last3[1] > last3[2],
        format!("final N_T/T {final_rate:.4}; last three {last3:.4?}"),
    )
}

fn kl_kernel_properties() -> Check {
    let cfg = KlInversionConfig::default();
    let grid: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
    let mut failures = Vec::new();
    for &p in &grid {
        for &q in &grid {
            let kl = bernoulli_kl(p, q).unwrap();
            if kl < 2.0 * (p - q) * (p - q) {
                failures.push(format!("pinsker {p} {q}"));
            }
            let mid = (p + 2.0 * q) / 3.0;
            if q > 0.0 && mid < 1.0 && kl < (p - q) * (p - q) / (2.0 * mid * (1.0 - mid)) - 1e-15 {
                failures.push(format!("generalized pinsker {p} {q}"));
            }
        }
        for k in 1..=100 {
            let level = 0.03 * k as f64;
            for x in [kl_ucb(p, level, &cfg).unwrap(), kl_lcb(p, level, &cfg).unwrap()] {
                if x > 0.0 && x < 1.0 && x != p && !round_trip_ok(p, x, level) {
                    failures.push(format!("round trip p={p} level={level} x={x}"));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..OPTIMISM_STATES {
        let n = rng.random_range(1..10_000u64);
        let t = rng.random_range(n..=1_000_000u64);
        let gamma = rng.random_range(1.0..3.0);
        let state = RunningMoments::from_parts(n, rng.random::<f64>(), 0.0);
        if klucbid_next_bid(&state, t, gamma, &cfg) > ucbid_next_bid(&state, t, gamma) {
            failures.push(format!("optimism n={n} t={t}"));
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "100x100 grid, 10^4 inversions per side, {OPTIMISM_STATES} random states; failures: {failures:?}"
        ),
    )
}

/// Residual within tolerance, or the exact root lies between `x` and one of
/// its neighbouring floats.
fn round_trip_ok(p: f64, x: f64, level: f64) -> bool {
    let kl = |q: f64| bernoulli_kl(p, q).unwrap();
    if (kl(x) - level).abs() <= ROUND_TRIP_TOLERANCE {
        return true;
    }
    let bits = x.to_bits();
    let (down, up) = (f64::from_bits(bits - 1), f64::from_bits(bits + 1).min(1.0));
    let straddles = |a: f64, b: f64| (kl(a) - level) * (kl(b) - level) <= 0.0;
    straddles(down, x) || straddles(x, up)
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_ucbid");
    let csv = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let status = Command::new(bin)
            .args(["preset", "fig1c", "--trials", "100", "--seed", "9", "--threads", threads, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let a = csv("a.csv", "1");
    let b = csv("b.csv", "1");
    let c = csv("c.csv", "8");
    verdict(
        a == b && b == c && !a.is_empty(),
        format!("fig1c, 100 trials: {} bytes, three runs identical: {}", a.len(), a == b && b == c),
    )
}

fn estimator_equivalence() -> Check {
    let mut cfg = experiment(Preset::Fig1a, 2000);
    cfg.strategies = vec![StrategySpec::ucbid()];
    let cond = at(&run(&cfg), "ucbid", 10_000);
    cfg.estimator = RegretEstimator::Realized;
    let real = at(&run(&cfg), "ucbid", 10_000);
    let se = (cond.1 * cond.1 + real.1 * real.1).sqrt();
    verdict(
        (cond.0 - real.0).abs() < ESTIMATOR_SE * se,
        format!(
            "conditional {:.3}±{:.3}, realized {:.3}±{:.3}, gap {:.2} SE",
            cond.0,
            cond.1,
            real.0,
            real.1,
            (cond.0 - real.0).abs() / se
        ),
    )
}

fn main() -> ExitCode {
    let checks: [NamedCheck; 10] = [
        ("fig1a ordering", fig1a_ordering),
        ("fig1b crossover", fig1b_crossover),
        ("fig1c linear baselines", fig1c_linear_baselines),
        ("fig1d shape", fig1d_shape),
        ("ucbid non-asymptotic bound", ucbid_bound_holds),
        ("oracle zero regret", oracle_zero_regret),
        ("win-rate limit", win_rate_limit),
        ("kl kernel properties", kl_kernel_properties),
        ("determinism", determinism),
        ("estimator equivalence", estimator_equivalence),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in checks {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance check(s) failed");
        ExitCode::FAILURE
    }
}
