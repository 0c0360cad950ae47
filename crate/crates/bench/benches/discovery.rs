use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use pim_bench::synthetic_log;
use pim_core::{
    discover, evaluate, find_cut, DiscoveryOptions, FollowsGraphs, LogShape, QualityOptions,
    SearchOptions,
};

fn graphs(c: &mut Criterion) {
    let log = synthetic_log(10_000, 7);
    c.bench_function("follows_graphs/10k", |b| {
        b.iter(|| FollowsGraphs::build(black_box(&log)))
    });
}

fn cut_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_cut");
    let log = synthetic_log(2_000, 7);
    let g = FollowsGraphs::build(&log);
    let shape = LogShape::of(&log);
    for limit in [1, 12] {
        group.bench_with_input(
            BenchmarkId::new("root_20_activities", limit),
            &limit,
            |b, &limit| {
                b.iter(|| {
                    find_cut(
                        &g,
                        shape,
                        SearchOptions {
                            exhaustive_limit: limit,
                        },
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

fn discovery(c: &mut Criterion) {
    let mut group = c.benchmark_group("discover");
    group.sample_size(10);
    for traces in [5_000, 10_000, 20_000] {
        let log = synthetic_log(traces, 7);
        group.throughput(Throughput::Elements(traces as u64));
        group.bench_with_input(BenchmarkId::from_parameter(traces), &log, |b, log| {
            b.iter(|| discover(log, &DiscoveryOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn quality(c: &mut Criterion) {
    let log = synthetic_log(1_000, 7);
    let tree = discover(&log, &DiscoveryOptions::default()).unwrap();
    let opts = QualityOptions {
        loop_bound: 1,
        ..QualityOptions::default()
    };
    if evaluate(&tree, &log, opts).is_ok() {
        c.bench_function("evaluate/1k", |b| {
            b.iter(|| evaluate(&tree, &log, opts).unwrap())
        });
    }
}

criterion_group!(benches, graphs, cut_search, discovery, quality);
criterion_main!(benches);
