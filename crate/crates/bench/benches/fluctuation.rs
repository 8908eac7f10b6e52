use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mfadcca_bench::fgn_pair;
use mfadcca_core::detrend::{build_index_proxy, build_profile};
use mfadcca_core::mfadcca::{analyze_values, fluctuation_functions, FluctuationOptions};
use mfadcca_core::{IncrementSeries, MfadccaConfig, QGrid, ScaleGrid};

fn fluctuation(c: &mut Criterion) {
    let qs = QGrid::range(-10.0, 10.0, 0.5).unwrap();
    let mut group = c.benchmark_group("fluctuation_functions");
    group.sample_size(10);
    for n in [2048usize, 8192] {
        let (x, y) = fgn_pair(0.6, n);
        let xs = IncrementSeries::generic(x).unwrap();
        let ys = IncrementSeries::generic(y).unwrap();
        let (px, py) = (build_profile(&xs).unwrap(), build_profile(&ys).unwrap());
        let proxy = build_index_proxy(&xs).unwrap();
        let scales = ScaleGrid::fluctuation_policy(n).unwrap();
        let opts = FluctuationOptions::default();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| fluctuation_functions(&px, &py, &proxy, &scales, &qs, &opts).unwrap())
        });
    }
    group.finish();

    let (x, y) = fgn_pair(0.6, 2048);
    let cfg = MfadccaConfig { qs, ..Default::default() };
    c.bench_function("analyze_2048", |b| b.iter(|| analyze_values(&x, &y, &cfg).unwrap()));
}

criterion_group!(benches, fluctuation);
criterion_main!(benches);
