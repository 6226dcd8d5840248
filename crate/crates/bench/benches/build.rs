use std::hint::black_box;

use compaction_forge::ctx::Config;
use compaction_forge::Strategy;
use compaction_forge_bench::{batch, compact, run, LADDER_SIZES};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn build_ladder(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_ladder_w8");
    group.sample_size(10);
    for &n in LADDER_SIZES {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| compact(n, 8, Strategy::Ladder)));
    }
    group.finish();
}

fn count_only(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_w16");
    group.sample_size(10);
    let cfg = Config::default();
    for n in [1024usize, 4096, 16384] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| compaction_forge::compact::count(n, 16, Strategy::Ladder, &cfg).unwrap())
        });
    }
    group.finish();
}

fn eval_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("eval_64_lanes_w4");
    for (name, s) in [("ladder", Strategy::Ladder), ("tiny", Strategy::Tiny)] {
        let circ = compact(1024, 4, s);
        let inputs = batch(1024, 4);
        group.bench_function(name, |b| b.iter(|| run(black_box(&circ), &inputs)));
    }
    group.finish();
}

criterion_group!(benches, build_ladder, count_only, eval_batch);
criterion_main!(benches);
