//! Pseudospectral laboratory for the Benjamin equation
//! `u_t - gamma u_x + alpha H u_xx + beta u_xxx + (u^2)_x = 0` on a periodic interval,
//! together with the modified-energy machinery of the I-method.

pub mod error;
pub mod evolve;
pub mod gwp;
pub mod imethod;
pub mod lab;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{RealField, SpectralGrid, SymbolParams};

/// Version string embedded in every report.
pub const VERSION: &str = concat!("benjamin-lab ", env!("CARGO_PKG_VERSION"));
