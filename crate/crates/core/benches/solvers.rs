use std::hint::black_box;

use cliffcut::baselines::exact_maxcut_with;
use cliffcut::experiments::{run_batch, BatchConfig, Family, SolverSpec};
use cliffcut::graph::gen_complete;
use cliffcut::{deterministic, Parallelism, RngSeed, TiePolicy, WeightSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Parallelism); 2] = [
    ("sequential", Parallelism::Sequential),
    ("parallel", Parallelism::Parallel),
];

fn bench_deterministic(c: &mut Criterion) {
    let mut group = c.benchmark_group("deterministic");
    group.sample_size(20);
    for n in [50, 100, 200] {
        let g = gen_complete(n, WeightSpec::U01, RngSeed(1)).unwrap();
        for (label, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(label, n), &g, |b, g| {
                b.iter(|| deterministic(black_box(g), &TiePolicy::LowestIndex, mode).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    group.sample_size(10);
    for n in [16, 20] {
        let g = gen_complete(n, WeightSpec::U01, RngSeed(2)).unwrap();
        for (label, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(label, n), &g, |b, g| {
                b.iter(|| exact_maxcut_with(black_box(g), 26, mode).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch");
    group.sample_size(10);
    let config = BatchConfig {
        family: Family::Sk,
        sizes: vec![40, 80],
        instances: 8,
        solvers: vec![SolverSpec::AdaptDet, SolverSpec::Local],
        master_seed: 3,
        exact: false,
        exact_limit: 26,
    };
    for (label, mode) in MODES {
        group.bench_function(label, |b| b.iter(|| run_batch(black_box(&config), mode, None).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_deterministic, bench_exact, bench_batch);
criterion_main!(benches);
