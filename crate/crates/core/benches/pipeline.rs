//! Single-threaded versus pooled execution of the parallel stages.
//!
//! Build with `--no-default-features` to benchmark the sequential fallback
//! alone; both variants then run the same code.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use circperm::derive::{derive, Options};
use circperm::oracle::{enumerate_stats, ryser_permanent, Budget};
use circperm::par::{current_threads, with_threads};
use circperm::spec::{adjacency_matrix, parse_spec};
use circperm::transfer::TransferSystem;

fn pools() -> [(&'static str, usize); 2] {
    [("sequential", 1), ("pooled", 0)]
}

fn ryser(c: &mut Criterion) {
    let spec = parse_spec("0,1,3,4", None).unwrap();
    let m = adjacency_matrix(&spec, 18).unwrap();
    let mut g = c.benchmark_group("ryser_18");
    for (name, threads) in pools() {
        g.bench_function(BenchmarkId::new(name, current_threads()), |b| {
            b.iter(|| with_threads(threads, || ryser_permanent(black_box(&m)).unwrap()))
        });
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let spec = parse_spec("-1,0,1,2", None).unwrap();
    let budget = Budget::default();
    let mut g = c.benchmark_group("enumerate_16");
    for (name, threads) in pools() {
        g.bench_function(BenchmarkId::new(name, current_threads()), |b| {
            b.iter(|| with_threads(threads, || enumerate_stats(black_box(&spec), 16, 2, &budget).unwrap()))
        });
    }
    g.finish();
}

fn transfer(c: &mut Criterion) {
    let spec = parse_spec("2,n+1,2n+2", Some("3n+1")).unwrap();
    let norm = circperm::spec::normalize(&spec);
    let mut g = c.benchmark_group("transfer_3n_plus_1");
    g.sample_size(10);
    for (name, threads) in pools() {
        g.bench_function(BenchmarkId::new(format!("build_{name}"), current_threads()), |b| {
            b.iter(|| with_threads(threads, || TransferSystem::build(black_box(&norm)).unwrap()))
        });
    }
    let system = TransferSystem::build(&norm).unwrap();
    for (name, threads) in pools() {
        g.bench_function(BenchmarkId::new(format!("sequence_{name}"), current_threads()), |b| {
            b.iter(|| with_threads(threads, || system.sequence(black_box(80))))
        });
    }
    for (name, threads) in pools() {
        g.bench_function(BenchmarkId::new(format!("derive_{name}"), current_threads()), |b| {
            b.iter(|| with_threads(threads, || derive(black_box(&spec), &Options::default()).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, ryser, enumeration, transfer);
criterion_main!(benches);
