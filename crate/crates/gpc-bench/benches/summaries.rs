use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use gpc_bench::random_diagram;
use gpc_core::curves::{l1_distance, GpcModel};
use gpc_core::injectivity::moment_table;
use gpc_core::matching::wasserstein1;
use gpc_core::quad::QuadratureSpec;
use gpc_core::weights::WeightSpec;

fn bench_curve_eval(c: &mut Criterion) {
    let model = GpcModel::new(random_diagram(1, 100), &WeightSpec::unweighted(), 1.0).unwrap();
    c.bench_function("gpc_eval 100 points x 256 samples", |b| {
        b.iter(|| black_box(model.sample(-3.0, 13.0, 256)))
    });
}

fn bench_l1_norms(c: &mut Criterion) {
    let model = GpcModel::new(random_diagram(2, 100), &WeightSpec::life(), 1.0).unwrap();
    c.bench_function("l1_norm_closed 100 points", |b| {
        b.iter(|| black_box(model.l1_norm_closed()))
    });

    let spec = QuadratureSpec::default();
    let small = GpcModel::new(random_diagram(3, 20), &WeightSpec::unweighted(), 1.0).unwrap();
    c.bench_function("l1_norm_quadrature 20 points", |b| {
        b.iter(|| black_box(small.l1_norm_quadrature(&spec).unwrap()))
    });

    let other = GpcModel::new(random_diagram(4, 20), &WeightSpec::unweighted(), 1.0).unwrap();
    c.bench_function("l1_distance 20 vs 20 points", |b| {
        b.iter(|| black_box(l1_distance(&small, &other, &spec).unwrap()))
    });
}

fn bench_wasserstein(c: &mut Criterion) {
    let left = random_diagram(5, 25);
    let right = random_diagram(6, 25);
    c.bench_function("wasserstein1 25 vs 25 points", |b| {
        b.iter(|| black_box(wasserstein1(&left, &right)))
    });
}

fn bench_moments(c: &mut Criterion) {
    let d = random_diagram(7, 50);
    c.bench_function("moment_table order 10, 50 points", |b| {
        b.iter(|| black_box(moment_table(&d, 10).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_curve_eval,
    bench_l1_norms,
    bench_wasserstein,
    bench_moments
);
criterion_main!(benches);
