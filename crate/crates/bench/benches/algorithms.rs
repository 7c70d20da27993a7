use congest_dso::apsisp::compute_2apsisp;
use congest_dso::dso_fastpre::{answer_batch_pre, preprocess_fast_pre, FastPreParams};
use congest_dso::dso_fastquery::{answer_batch_fast, preprocess_fast_query};
use congest_dso::exclude::{exclude_multi_source, ExcludeOptions, ExcludeRequest};
use congest_dso::graph::build_sp_tree;
use congest_dso::workload::random_independent_paths;
use congest_dso::{NetworkRun, SimConfig};
use congest_dso_bench::{charged, graph, queries};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn exclude(c: &mut Criterion) {
    let mut group = c.benchmark_group("exclude_multi_source");
    group.sample_size(10);
    for n in [16, 32] {
        let g = graph(n, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let reqs: Vec<ExcludeRequest> =
            (0..4).map(|x| ExcludeRequest::new(x, random_independent_paths(&g, &build_sp_tree(&g, x), &mut rng, 4))).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &reqs, |b, reqs| {
            b.iter(|| {
                let mut run = NetworkRun::new(&g, SimConfig::default()).unwrap();
                exclude_multi_source(&mut run, reqs, ExcludeOptions::default()).unwrap()
            })
        });
    }
    group.finish();
}

fn fast_query(c: &mut Criterion) {
    let mut group = c.benchmark_group("fast_query");
    group.sample_size(10);
    let g = graph(32, 2);
    group.bench_function("preprocess/32", |b| b.iter(|| preprocess_fast_query(&mut NetworkRun::new(&g, charged()).unwrap()).unwrap()));
    let mut run = NetworkRun::new(&g, charged()).unwrap();
    let state = preprocess_fast_query(&mut run).unwrap();
    for k in [1, 16] {
        let batch = queries(&g, k, 2);
        group.bench_with_input(BenchmarkId::new("answer", k), &batch, |b, batch| b.iter(|| answer_batch_fast(&mut run, &state, batch)));
    }
    group.finish();
}

fn fast_pre(c: &mut Criterion) {
    let mut group = c.benchmark_group("fast_pre");
    group.sample_size(10);
    let g = graph(32, 3);
    group.bench_function("preprocess/32", |b| {
        b.iter(|| preprocess_fast_pre(&mut NetworkRun::new(&g, charged()).unwrap(), FastPreParams::default()).unwrap())
    });
    let mut run = NetworkRun::new(&g, charged()).unwrap();
    let state = preprocess_fast_pre(&mut run, FastPreParams::default()).unwrap();
    let batch = queries(&g, 4, 3);
    group.bench_function("answer/4", |b| b.iter(|| answer_batch_pre(&mut run, &state, &batch)));
    group.finish();
}

fn apsisp(c: &mut Criterion) {
    let mut group = c.benchmark_group("apsisp");
    group.sample_size(10);
    for n in [16, 24] {
        let g = graph(n, 4);
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| compute_2apsisp(&mut NetworkRun::new(&g, SimConfig::default()).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, exclude, fast_query, fast_pre, apsisp);
criterion_main!(benches);
