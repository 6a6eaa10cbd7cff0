//! Shared fixtures for the benchmark targets.

use std::f64::consts::TAU;

use benjamin_core::rng::seeded;
use benjamin_core::spectral::random_power_law;
use benjamin_core::{RealField, SpectralGrid, SymbolParams};

/// `alpha = 1/2`, `beta = 1`, `gamma = 0`.
pub fn params() -> SymbolParams {
    SymbolParams::new(0.5, 1.0, 0.0).expect("valid parameters")
}

/// Power-law data on `[0, 2 pi)` with `K` modes, filling the dealiased band.
pub fn field(modes: usize, seed: u64) -> RealField {
    let grid = SpectralGrid::new(modes, TAU).expect("valid grid");
    random_power_law(&grid, grid.dealias_cutoff(), 1.0, 0.3, &mut seeded(seed, 0))
}
