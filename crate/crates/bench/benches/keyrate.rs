use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qkdrate_bench::{diagonal, unsharp_data};
use qkdrate_core::{general_adversary_bound, symmetric_rate, threshold_qber, OptimizerSettings};

fn closed_form(c: &mut Criterion) {
    c.bench_function("symmetric_rate", |b| b.iter(|| symmetric_rate(black_box(0.05))));
    c.bench_function("threshold_qber", |b| b.iter(threshold_qber));
}

fn optimizer(c: &mut Criterion) {
    let settings = OptimizerSettings::default();
    let mut g = c.benchmark_group("general_adversary_bound");
    g.sample_size(20);
    let diag = diagonal(0.05);
    g.bench_function("diagonal", |b| b.iter(|| general_adversary_bound(black_box(&diag), &settings)));
    let unsharp = unsharp_data();
    g.bench_function("unsharp", |b| b.iter(|| general_adversary_bound(black_box(&unsharp), &settings)));
    g.finish();
}

criterion_group!(benches, closed_form, optimizer);
criterion_main!(benches);
