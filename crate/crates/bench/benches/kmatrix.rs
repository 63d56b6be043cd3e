use criterion::{criterion_group, criterion_main, Criterion};
use ghom_bench::ksum_cases;
use ghom_core::kmatrix::{count_k, permanent_by_ksum};
use ghom_core::permanent::amplitude_unnormalized;

fn ksum_vs_ryser(c: &mut Criterion) {
    let mut g = c.benchmark_group("ksum_vs_ryser");
    g.sample_size(20);
    for (name, t) in ksum_cases() {
        g.bench_function(format!("count/{name}"), |b| b.iter(|| count_k(&t).unwrap()));
        g.bench_function(format!("ksum/{name}"), |b| {
            b.iter(|| permanent_by_ksum(&t).unwrap())
        });
        g.bench_function(format!("ryser/{name}"), |b| {
            b.iter(|| amplitude_unnormalized(&t).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, ksum_vs_ryser);
criterion_main!(benches);
