use ucbid_core::bounds::{
    bernstein_bound, etgstop_bound, klucbid_asymptotic_leading, klucbid_nonasymptotic_bound,
    optimistic_lower_bound, ucbid_asymptotic_leading, ucbid_bound, ProblemParams,
};
use ucbid_core::Result;

fn grid() -> impl Iterator<Item = f64> {
    (1..=19).map(|k| k as f64 * 0.05)
}

fn params(v: f64, gamma: f64, horizon: u64) -> ProblemParams {
    // Bernoulli values: w = v (1 - v)
    ProblemParams::uniform(v, v * (1.0 - v), gamma, horizon).unwrap()
}

#[test]
fn kl_leading_term_never_exceeds_ucbid_leading_term() {
    for v in grid() {
        let p = params(v, 1.1, 1_000_000);
        assert!(klucbid_asymptotic_leading(&p).unwrap() <= ucbid_asymptotic_leading(&p).unwrap());
    }
}

#[test]
fn lower_bound_rate_below_upper_bounds() {
    let horizon = 1_000_000;
    let ln_t = (horizon as f64).ln();
    for v in grid() {
        let rate = optimistic_lower_bound(&params(v, 2.1, horizon)).unwrap();
        for (name, value) in [
            ("ucbid", ucbid_bound(&params(v, 1.1, horizon))),
            ("klucbid", klucbid_nonasymptotic_bound(&params(v, 1.1, horizon))),
            ("bernstein", bernstein_bound(&params(v, 2.1, horizon))),
            ("etgstop", etgstop_bound(&params(v, 1.1, horizon))),
        ] {
            assert!(rate <= value.unwrap() / ln_t, "{name} at v={v}");
        }
    }
}

#[test]
fn bounds_are_nondecreasing_in_horizon() {
    type Eval = fn(&ProblemParams) -> Result<f64>;
    let evals: [(&str, Eval, f64); 6] = [
        ("ucbid", ucbid_bound, 1.1),
        ("klucbid", klucbid_nonasymptotic_bound, 1.1),
        ("bernstein", bernstein_bound, 2.1),
        ("ucbid_leading", ucbid_asymptotic_leading, 1.1),
        ("klucbid_leading", klucbid_asymptotic_leading, 1.1),
        ("etgstop", etgstop_bound, 1.1),
    ];
    for alpha in [0.5, 1.0, 2.0] {
        for v in [0.3, 0.6, 0.9] {
            for (name, f, gamma) in evals {
                let mut p = params(v, gamma, 1);
                p.alpha = alpha;
                let mut prev = f64::NEG_INFINITY;
                for horizon in [2, 10, 100, 1_000, 10_000, 1_000_000, 10_000_000] {
                    if let Ok(value) = f(&p.with_horizon(horizon)) {
                        assert!(value >= prev, "{name} decreased at T={horizon}, alpha={alpha}, v={v}");
                        prev = value;
                    }
                }
            }
        }
    }
}
