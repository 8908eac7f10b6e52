use criterion::{criterion_group, criterion_main, Criterion};
use mfadcca_bench::gjr_returns;
use mfadcca_core::garch::fit;
use mfadcca_core::GarchModel;

fn garch(c: &mut Criterion) {
    let r = gjr_returns(1500);
    let mut group = c.benchmark_group("garch_fit_1500");
    group.sample_size(10);
    for model in [GarchModel::Egarch, GarchModel::Gjr] {
        group.bench_function(model.name(), |b| b.iter(|| fit(model, &r).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, garch);
criterion_main!(benches);
