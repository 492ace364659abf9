use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use misout::allocator::{figure1_table, optimal_k};
use misout::calculus::outage_gradient;
use misout::oracle::{brute_force_min, fourier_cdf, monte_carlo};
use misout::{erlang_outage, WeightedExpSum, Weights};

fn evaluation(c: &mut Criterion) {
    let separated = WeightedExpSum::from_raw_weights(&[0.5, 0.3, 0.15, 0.05]).unwrap();
    // Close enough to stress the partial fractions, far enough to stay on
    // the closed-form path
    let clustered = WeightedExpSum::from_raw_weights(&[0.333, 0.3333, 0.3336]).unwrap();
    let mut g = c.benchmark_group("evaluation");
    g.bench_function("cdf_separated", |b| {
        b.iter(|| separated.cdf(black_box(0.8)))
    });
    g.bench_function("cdf_clustered", |b| {
        b.iter(|| clustered.cdf(black_box(0.9)))
    });
    g.bench_function("density_derivative", |b| {
        b.iter(|| separated.density_derivative(black_box(0.8), 1).unwrap())
    });
    g.bench_function("erlang_outage_k12", |b| {
        b.iter(|| erlang_outage(black_box(12), black_box(0.9)))
    });
    let q = Weights::new(vec![0.5, 0.3, 0.2]).unwrap();
    g.bench_function("outage_gradient_t3", |b| {
        b.iter(|| outage_gradient(black_box(&q), black_box(0.8)).unwrap())
    });
    g.bench_function("fourier_cdf", |b| {
        b.iter(|| fourier_cdf(black_box(&separated), black_box(0.8)).unwrap())
    });
    g.finish();
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.bench_function("optimal_k_t40", |b| {
        b.iter(|| optimal_k(black_box(0.8), black_box(40)))
    });
    g.bench_function("figure1_table_t8", |b| {
        b.iter(|| figure1_table(black_box(8)))
    });
    g.bench_function("brute_force_min_t2_g300", |b| {
        b.iter(|| brute_force_min(black_box(2), black_box(1.1), black_box(300)).unwrap())
    });
    let q = Weights::new(vec![0.5, 0.3, 0.2]).unwrap();
    g.throughput(Throughput::Elements(100_000));
    g.bench_function("monte_carlo_100k", |b| {
        b.iter(|| monte_carlo(black_box(&q), black_box(0.8), 100_000, 42))
    });
    g.finish();
}

criterion_group!(benches, evaluation, search);
criterion_main!(benches);
