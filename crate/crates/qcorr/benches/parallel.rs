//! Parallel-vs-sequential benchmarks for the optimizer-driven workloads.
//!
//! With the default `parallel` feature, the same workload is measured inside
//! rayon pools of one thread and of all cores; built with
//! `--no-default-features` the library runs its sequential fallback and the
//! pool size is irrelevant. The two baselines correspond line-for-line.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcorr::measures::{discord, eof, MeasurementKind};
use qcorr::optimize::OptimizerConfig;
use qcorr::qcore::random::{random_bipartite_with, stream_rng};
use qcorr::qcore::state::BipartiteState;
use qcorr::suites::{run_suite, SuiteName};

fn battery(count: usize) -> Vec<BipartiteState> {
    (0..count)
        .map(|i| {
            let mut rng = stream_rng(0xBEEF, i as u64);
            random_bipartite_with(2, 2, 2, &mut rng).unwrap()
        })
        .collect()
}

fn bench_cfg() -> OptimizerConfig {
    OptimizerConfig {
        starts: 16,
        max_iters: 400,
        tol_f: 1e-9,
        seed: 7,
        bounds: Vec::new(),
    }
}

fn eof_battery(states: &[BipartiteState]) -> f64 {
    let cfg = bench_cfg();
    states
        .iter()
        .map(|st| eof(st, Some(4), &cfg).unwrap().value)
        .sum()
}

fn discord_battery(states: &[BipartiteState]) -> f64 {
    let cfg = bench_cfg();
    states
        .iter()
        .map(|st| discord(st, MeasurementKind::VonNeumann, &cfg).unwrap().value)
        .sum()
}

fn steering_suite() -> f64 {
    let cfg = OptimizerConfig::default();
    run_suite(SuiteName::SteeringCompleteness, 3, 24, &cfg)
        .unwrap()
        .worst_residual
}

#[cfg(feature = "parallel")]
fn bench_workloads(c: &mut Criterion) {
    let states = battery(6);
    let mut group = c.benchmark_group("multi_start_battery");
    group.sample_size(10);
    for threads in [1usize, num_threads()] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        group.bench_with_input(BenchmarkId::new("eof", threads), &threads, |b, _| {
            b.iter(|| pool.install(|| eof_battery(&states)))
        });
        group.bench_with_input(BenchmarkId::new("discord_vn", threads), &threads, |b, _| {
            b.iter(|| pool.install(|| discord_battery(&states)))
        });
        group.bench_with_input(BenchmarkId::new("steering_suite", threads), &threads, |b, _| {
            b.iter(|| pool.install(steering_suite))
        });
    }
    group.finish();
}

#[cfg(feature = "parallel")]
fn num_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(2)
}

#[cfg(not(feature = "parallel"))]
fn bench_workloads(c: &mut Criterion) {
    let states = battery(6);
    let mut group = c.benchmark_group("multi_start_battery_sequential");
    group.sample_size(10);
    group.bench_function("eof", |b| b.iter(|| eof_battery(&states)));
    group.bench_function("discord_vn", |b| b.iter(|| discord_battery(&states)));
    group.bench_function("steering_suite", |b| b.iter(steering_suite));
    group.finish();
}

criterion_group!(benches, bench_workloads);
criterion_main!(benches);
