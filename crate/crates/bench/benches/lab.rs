use benjamin_core::imethod::IMultiplier;
use benjamin_core::lab::{block_norm_estimate, multiplier_bound_check, BlockLattice, DyadicConfig, MultiplierBound};
use benjamin_core::SymbolParams;
use criterion::{criterion_group, criterion_main, Criterion};

fn bound_checks(c: &mut Criterion) {
    let p = benjamin_bench::params();
    let im = IMultiplier::new(8.0, -0.75).unwrap();
    let mut group = c.benchmark_group("lab");
    group.sample_size(10);
    group.bench_function("m5_check_2000", |b| {
        b.iter(|| multiplier_bound_check(MultiplierBound::M5, im, &p, 128, 2000, 1).unwrap())
    });
    let cfg = DyadicConfig::new([5, 4, 3], [0, 9, 3]).unwrap();
    let lattice = BlockLattice::default();
    group.bench_function("block_estimate_k543", |b| {
        b.iter(|| block_norm_estimate(&cfg, &SymbolParams::airy(), 16, &lattice, 1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bound_checks);
criterion_main!(benches);
