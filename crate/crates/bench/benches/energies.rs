use std::hint::black_box;

use benjamin_bench::{field, params};
use benjamin_core::imethod::{energies_at, Corrections, EnergyFunctionals, IMultiplier};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn modified_energies(c: &mut Criterion) {
    let p = params();
    let im = IMultiplier::new(8.0, -0.75).unwrap();
    let mut group = c.benchmark_group("energies");
    group.sample_size(20);
    for modes in [32usize, 64] {
        let u = field(modes, 2);
        let grid = u.grid();
        let corr = Corrections::new(im, &p)
            .unwrap()
            .with_pair_cutoff(grid.cutoff_wavenumber())
            .tabulated(grid, 4 * grid.modes());
        let f = EnergyFunctionals::new(&corr);
        group.bench_with_input(BenchmarkId::new("lambda3_sigma3", modes), &modes, |b, _| {
            b.iter(|| f.lambda3_sigma3(black_box(&u)))
        });
        group.bench_with_input(BenchmarkId::new("lambda4_sigma4", modes), &modes, |b, _| {
            b.iter(|| f.lambda4_sigma4(black_box(&u)))
        });
        group.bench_with_input(BenchmarkId::new("e2_e3_e4", modes), &modes, |b, _| {
            b.iter(|| energies_at(&corr, black_box(&u)))
        });
    }
    group.finish();
}

fn multipliers(c: &mut Criterion) {
    let corr = Corrections::new(IMultiplier::new(8.0, -0.75).unwrap(), &params()).unwrap();
    let x4 = [37.0, -12.0, 5.0, -30.0];
    let x5 = [41.0, -17.0, 9.0, -25.0, -8.0];
    c.bench_function("m4_value", |b| b.iter(|| corr.m4_value(black_box(x4))));
    c.bench_function("m5_value", |b| b.iter(|| corr.m5_value(black_box(x5))));
}

criterion_group!(benches, modified_energies, multipliers);
criterion_main!(benches);
