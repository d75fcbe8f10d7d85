//! Sequential versus rayon execution of the seeded batch suites.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use palinverse::batch::{factorization_suite, mup_suite, round_trip_suite, Mode};
use palinverse::system::SymmetryClass;

const MODES: [(&str, Mode); 2] = [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)];

fn round_trip(c: &mut Criterion) {
    let mut group = c.benchmark_group("round_trip_50");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| black_box(round_trip_suite(SymmetryClass::H_PAL, 50, 1, mode)))
        });
    }
    group.finish();
}

fn factorization(c: &mut Criterion) {
    let mut group = c.benchmark_group("factorization_100");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| black_box(factorization_suite(SymmetryClass::T_PAL, 100, 1, mode)))
        });
    }
    group.finish();
}

fn updates(c: &mut Criterion) {
    let mut group = c.benchmark_group("update_50");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| black_box(mup_suite(SymmetryClass::T_ANTI, 50, 1, mode)))
        });
    }
    group.finish();
}

criterion_group!(benches, round_trip, factorization, updates);
criterion_main!(benches);
