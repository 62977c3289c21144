use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hamel_bench::{operator, space};
use hamel_core::jprobe::SampleRange;
use hamel_core::qspace::greedy_extract;
use hamel_core::{Enumeration, Evaluator, Rational};

fn greedy(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy_extract");
    for n in [32, 128, 512] {
        let s = space(n);
        let units = s.units();
        // each unit followed by a dependent pair sum
        let items: Vec<_> = units
            .iter()
            .zip(units.iter().skip(1))
            .flat_map(|(a, b)| [a.clone(), a + b])
            .collect();
        let e = Enumeration::new(items);
        group.bench_with_input(BenchmarkId::from_parameter(n), &e, |b, e| b.iter(|| greedy_extract(black_box(e))));
    }
    group.finish();
}

fn chain(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_j_operator");
    group.sample_size(10);
    for n in [32, 128, 1024] {
        let s = space(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &s, |b, s| b.iter(|| operator(black_box(s))));
    }
    group.finish();
}

fn interval(c: &mut Criterion) {
    let s = space(128);
    let ev = Evaluator::new(&s);
    let v = s.unit("sqrt709").unwrap();
    let mut group = c.benchmark_group("eval_interval");
    for bits in [64, 512, 4096] {
        group.bench_with_input(BenchmarkId::from_parameter(bits), &bits, |b, &bits| {
            b.iter(|| ev.eval_interval(black_box(&v), bits).unwrap())
        });
    }
    group.finish();
}

fn probes(c: &mut Criterion) {
    let s = space(128);
    let j = operator(&s);
    let samples = j.sample_vectors(1000, 0, SampleRange::default());
    let mut group = c.benchmark_group("probes");
    group.sample_size(10);
    group.bench_function("inner_inner_1000", |b| b.iter(|| j.probe_inner_inner(black_box(&samples), Some(0)).unwrap()));
    group.bench_function("abs_abs_32", |b| b.iter(|| j.probe_abs_abs(32, 256).unwrap()));
    group.bench_function("inner_abs_10", |b| b.iter(|| j.probe_inner_abs(&Rational::from(10)).unwrap()));
    group.finish();
}

criterion_group!(benches, greedy, chain, interval, probes);
criterion_main!(benches);
