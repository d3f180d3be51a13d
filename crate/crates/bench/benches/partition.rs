use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spzf_core::rng::trial_rng;
use spzf_core::{ChannelModelConfig, PartitionAlgo};

fn partition_algorithms(c: &mut Criterion) {
    let model = ChannelModelConfig::default();
    let mut group = c.benchmark_group("partition");
    for n in [20usize, 30] {
        let mut rng = trial_rng(7, n as u64);
        let mags = model.sample(n, &mut rng).unwrap().magnitudes();
        for algo in [
            PartitionAlgo::Random,
            PartitionAlgo::Iterative,
            PartitionAlgo::IterativeFc,
            PartitionAlgo::Genetic,
        ] {
            group.bench_with_input(BenchmarkId::new(algo.name(), n), &mags, |b, mags| {
                let mut rng = trial_rng(11, 0);
                b.iter(|| algo.partition(black_box(mags), 4, &mut rng).unwrap());
            });
        }
    }
    group.finish();
}

criterion_group!(benches, partition_algorithms);
criterion_main!(benches);
