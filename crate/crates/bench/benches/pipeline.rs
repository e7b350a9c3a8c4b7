use std::hint::black_box;

use awlift_bench::{power, scaled_enneper};
use awlift_core::extension::qc_report;
use awlift_core::harmonic::{condition_report, sigma_at};
use awlift_core::lift::lift_point;
use awlift_core::reflection::reflect_point;
use awlift_core::{Complex64, GridParams, Weierstrass};
use criterion::{criterion_group, criterion_main, Criterion};

fn pointwise(c: &mut Criterion) {
    let spec = scaled_enneper(0.5);
    let z = Complex64::new(0.4, -0.3);
    c.bench_function("jets", |b| b.iter(|| spec.jets(black_box(z)).unwrap()));
    c.bench_function("sigma", |b| {
        b.iter(|| sigma_at(&spec, black_box(z)).unwrap())
    });
    c.bench_function("lift_point", |b| {
        b.iter(|| lift_point(&spec, black_box(z)).unwrap())
    });
    c.bench_function("reflect_point", |b| {
        b.iter(|| reflect_point(&spec, black_box(z)).unwrap())
    });
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweeps");
    group.sample_size(10);
    let grid = GridParams::new(32, 64, 0.995, 1.5).unwrap();
    let enneper = scaled_enneper(0.5);
    let power = power(0.8);
    group.bench_function("condition_report_32x64", |b| {
        b.iter(|| condition_report(&enneper, &grid).unwrap())
    });
    group.bench_function("qc_report_100", |b| {
        b.iter(|| qc_report(&power, &grid, 100, 0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, pointwise, sweeps);
criterion_main!(benches);
