use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spzf_core::channel::sample_rayleigh;
use spzf_core::polygon::{polygon_solver, satisfies_polygon_inequality};
use spzf_core::rng::trial_rng;
use spzf_core::spzf::spzf_two_user;
use spzf_core::{Complex64, PartitionAlgo};

/// First Rayleigh draw of length `n` that satisfies the polygon inequality.
fn feasible(n: usize) -> Vec<Complex64> {
    (0..)
        .map(|t| sample_rayleigh(n, 1.0, &mut trial_rng(3, t)).unwrap())
        .find(|h| satisfies_polygon_inequality(&h.magnitudes()).unwrap())
        .unwrap()
        .into_inner()
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("polygon_solver");
    for n in [3usize, 5, 10, 20] {
        let h = feasible(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| polygon_solver(black_box(h)).unwrap());
        });
    }
    group.finish();
}

fn two_user(c: &mut Criterion) {
    let mut rng = trial_rng(5, 0);
    let h1 = sample_rayleigh(20, 1.0, &mut rng).unwrap();
    let h2 = sample_rayleigh(20, 1.0, &mut rng).unwrap();
    let part = PartitionAlgo::IterativeFc.partition(&h1.magnitudes(), 4, &mut rng).unwrap();
    c.bench_function("spzf_two_user/20", |b| {
        b.iter(|| spzf_two_user(black_box(&h1), black_box(&h2), &part).unwrap());
    });
}

criterion_group!(benches, solver, two_user);
criterion_main!(benches);
