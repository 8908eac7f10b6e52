use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mfadcca_bench::fgn_pair;
use mfadcca_core::dcca::{rho_dcca, rho_dcca_asym};
use mfadcca_core::qcc::qcc;
use mfadcca_core::ScaleGrid;

fn dcca(c: &mut Criterion) {
    let mut group = c.benchmark_group("rho_dcca_asym");
    group.sample_size(10);
    for n in [1024usize, 4096] {
        let (x, y) = fgn_pair(0.5, n);
        let scales = ScaleGrid::coefficient_default(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| rho_dcca_asym(&x, &y, &scales).unwrap())
        });
    }
    group.finish();

    let (x, y) = fgn_pair(0.5, 4096);
    let scales = ScaleGrid::coefficient_default(4096).unwrap();
    c.bench_function("rho_dcca_4096", |b| b.iter(|| rho_dcca(&x, &y, &scales).unwrap()));
    c.bench_function("qcc_4096_m500", |b| b.iter(|| qcc(&x, &y, 500, 0.05).unwrap()));
}

criterion_group!(benches, dcca);
criterion_main!(benches);
