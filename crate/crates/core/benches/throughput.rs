use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tandem_paoi::numerics::{ks_distance_with, EmpiricalDistribution};
use tandem_paoi::sim::{replicate, run_split, SimConfig};
use tandem_paoi::{par, Execution, Tandem, TandemParams};

const MODES: [(&str, Execution); 2] = [
    ("parallel", Execution::Parallel),
    ("sequential", Execution::Sequential),
];

fn cdf_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("cdf_table");
    group.sample_size(10);
    for (kind, params) in [
        ("md1", TandemParams::md1(0.5, 1.0, 0.8).unwrap()),
        ("mm1", TandemParams::mm1(0.5, 1.0, 1.25).unwrap()),
    ] {
        let tandem = Tandem::new(&params).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(kind, name), &exec, |b, &exec| {
                b.iter(|| tandem.cdf_table_with(black_box(exec)).unwrap())
            });
        }
    }
    group.finish();
}

fn ks(c: &mut Criterion) {
    let params = TandemParams::md1(0.5, 1.0, 0.8).unwrap();
    let tandem = Tandem::new(&params).unwrap();
    let table = tandem.cdf_table().unwrap();
    let split = run_split(&SimConfig::new(params, 201_000, 1000, 42).unwrap()).unwrap();
    let emp: &EmpiricalDistribution = &split.overall;
    let mut group = c.benchmark_group("ks_distance");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| ks_distance_with(|x| table.cdf_interp(x), black_box(emp), exec))
        });
    }
    group.finish();
}

fn replications(c: &mut Criterion) {
    let params = TandemParams::mm1(0.5, 1.0, 1.25).unwrap();
    let configs: Vec<_> = (0..8)
        .map(|seed| SimConfig::new(params, 50_000, 1000, seed).unwrap())
        .collect();
    let mut group = c.benchmark_group("replicate");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| replicate(black_box(&configs), exec)));
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let base = TandemParams::mm1(0.5, 1.0, 1.25).unwrap();
    let lambdas: Vec<f64> = (1..=19).map(|i| 0.05 * i as f64).collect();
    let mut group = c.benchmark_group("p99_sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                par::map_slice(exec, &lambdas, |&l| {
                    let t = Tandem::new(&base.with_lambda(l).unwrap()).unwrap();
                    t.cdf_table_with(Execution::Sequential)
                        .unwrap()
                        .quantile(0.99)
                        .unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, cdf_tables, ks, replications, sweep);
criterion_main!(benches);
