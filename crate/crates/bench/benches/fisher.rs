use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use scalefisher::fisher::{fisher_closed_form, fisher_exact, fisher_integral, whiten_spec};
use scalefisher::montecarlo::Sampler;
use scalefisher::{estimate, make_split};
use scalefisher_bench::fbm_wn;
use std::hint::black_box;

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("fisher_exact");
    g.sample_size(10);
    for n in [256usize, 1024] {
        let spec = fbm_wn(0.3, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &spec, |b, s| b.iter(|| fisher_exact(black_box(s))));
    }
    g.finish();
}

fn integral(c: &mut Criterion) {
    let mut g = c.benchmark_group("fisher_integral");
    for h in [0.25, 0.5, 0.75] {
        let spec = fbm_wn(h, 100_000_000);
        g.bench_with_input(BenchmarkId::from_parameter(h), &spec, |b, s| b.iter(|| fisher_integral(black_box(s))));
    }
    g.finish();
    let spec = fbm_wn(0.3, 1_000_000);
    c.bench_function("fisher_closed_form", |b| b.iter(|| fisher_closed_form(black_box(&spec))));
}

fn estimation(c: &mut Criterion) {
    let spec = fbm_wn(0.5, 512);
    let sampler = Sampler::new(&spec).unwrap();
    let system = whiten_spec(&spec).unwrap();
    let z = sampler.sample(1, 0);
    c.bench_function("sample_z/512", |b| b.iter(|| sampler.sample(black_box(1), black_box(0))));
    c.bench_function("make_split/512", |b| {
        b.iter(|| make_split(black_box(system.eigenvalues()), spec.n, spec.beta))
    });
    let mut g = c.benchmark_group("estimate");
    g.sample_size(10);
    g.bench_function("512", |b| b.iter(|| estimate(black_box(&z), &spec)));
    g.finish();
}

criterion_group!(benches, exact, integral, estimation);
criterion_main!(benches);
