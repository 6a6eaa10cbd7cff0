//! Grids, Fourier conventions, the dispersion symbol, dyadic pieces and norms.

mod dyadic;
mod field;
mod grid;
mod norms;
mod symbol;
mod transform;

pub use dyadic::{covering_index, eta0, eta_bump, project_dyadic, smoothstep};
pub use field::{random_gaussian, random_power_law, RealField};
pub use grid::SpectralGrid;
pub use norms::{l2_norm, l2_norm_physical, momentum, sobolev_norm, NormReport};
pub use symbol::{derivative, dispersion_symbol, free_propagator, hilbert_transform, SymbolParams};
pub use transform::Transform;
