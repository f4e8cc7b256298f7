//! Parallel vs sequential throughput of the pairwise kernels on a mid-size
//! planted-partition graph.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use graphdist::cluster;
use graphdist::distance::{self, DistanceMeasure};
use graphdist::ppm::{self, ClusterAssignment, PpmParams};
use graphdist::Graph;

fn bench_graph() -> (Graph, ClusterAssignment) {
    let params = PpmParams {
        clusters: 20,
        cluster_size: 40,
        p_intra: 0.8,
        p_inter: 0.1,
        seed: 2024,
    };
    ppm::generate(&params).expect("valid params")
}

fn cluster_summaries(c: &mut Criterion) {
    let (graph, assignment) = bench_graph();
    let mut group = c.benchmark_group("cluster_summaries");
    group.bench_function("parallel", |b| {
        b.iter(|| cluster::cluster_summaries(&graph, &assignment).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| cluster::cluster_summaries_seq(&graph, &assignment).unwrap())
    });
    group.finish();
}

fn global_means(c: &mut Criterion) {
    let (graph, _) = bench_graph();
    let mut group = c.benchmark_group("global_mean_distances");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| cluster::global_mean_distances(&graph, None, None).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| cluster::global_mean_distances_seq(&graph).unwrap())
    });
    group.finish();
}

fn pairwise(c: &mut Criterion) {
    let (graph, _) = bench_graph();
    let n = graph.vertex_count();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut group = c.benchmark_group("pairwise_jaccard");
    group.sample_size(20);
    group.bench_with_input(
        BenchmarkId::new("parallel", pairs.len()),
        &pairs,
        |b, pairs| b.iter(|| distance::pairwise(&graph, DistanceMeasure::Jaccard, pairs).unwrap()),
    );
    group.bench_with_input(
        BenchmarkId::new("sequential", pairs.len()),
        &pairs,
        |b, pairs| {
            b.iter(|| distance::pairwise_seq(&graph, DistanceMeasure::Jaccard, pairs).unwrap())
        },
    );
    group.finish();
}

criterion_group!(benches, cluster_summaries, global_means, pairwise);
criterion_main!(benches);
