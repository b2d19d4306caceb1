use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ucbid_core::simulator::log_spaced_checkpoints;
use ucbid_core::{run_trial, ExperimentConfig, OpponentDistribution, StrategySpec, ValueDistribution};

const HORIZON: u64 = 10_000;

fn trial(c: &mut Criterion) {
    let specs = [
        StrategySpec::ucbid(),
        StrategySpec::klucbid(),
        StrategySpec::bernstein_ucbid(),
        StrategySpec::EtgstopModified,
        StrategySpec::discrete_ucb(),
    ];
    let config = ExperimentConfig {
        value: ValueDistribution::bernoulli(0.3).unwrap(),
        opponent: OpponentDistribution::uniform(),
        horizon: HORIZON,
        trials: 1,
        base_seed: 1,
        strategies: specs.to_vec(),
        checkpoints: log_spaced_checkpoints(HORIZON, 200),
        estimator: Default::default(),
    };
    let mut g = c.benchmark_group("run_trial");
    g.throughput(Throughput::Elements(HORIZON));
    for spec in &specs {
        g.bench_with_input(BenchmarkId::from_parameter(spec.id()), spec, |b, spec| {
            b.iter(|| {
                let mut s = spec.build(HORIZON).unwrap();
                run_trial(&config, s.as_mut(), 7)
            })
        });
    }
    g.finish();
}

criterion_group!(benches, trial);
criterion_main!(benches);
