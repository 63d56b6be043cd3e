use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ghom_core::{build_sn, permanent_naive, permanent_ryser, PermanentConfig};
use ghom_core::permanent::permanent_ryser_with;

fn sn_ryser(c: &mut Criterion) {
    let mut g = c.benchmark_group("sn_ryser");
    g.sample_size(10);
    for n in [8usize, 10, 12, 14] {
        let m = build_sn(n).unwrap();
        g.bench_with_input(BenchmarkId::new("parallel", n), &m, |b, m| {
            b.iter(|| permanent_ryser(m).unwrap())
        });
        let seq = PermanentConfig {
            parallel: false,
            ..PermanentConfig::default()
        };
        g.bench_with_input(BenchmarkId::new("sequential", n), &m, |b, m| {
            b.iter(|| permanent_ryser_with(m, &seq).unwrap())
        });
    }
    g.finish();
}

fn naive_vs_ryser(c: &mut Criterion) {
    let mut g = c.benchmark_group("naive_vs_ryser");
    for n in [5usize, 7] {
        let m = build_sn(n).unwrap();
        g.bench_with_input(BenchmarkId::new("naive", n), &m, |b, m| {
            b.iter(|| permanent_naive(m).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("ryser", n), &m, |b, m| {
            b.iter(|| permanent_ryser(m).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sn_ryser, naive_vs_ryser);
criterion_main!(benches);
