//! The I-operator, hyperplane sums and the modified energies.

mod corrections;
mod energy;
mod lambda;
mod multiplier;

pub use corrections::{h_k, v_k, Corrections, RESONANCE_EPS};
pub(crate) use corrections::{PAIRS4, PAIRS5};
pub use energy::{energies_at, modified_energies, Energies, EnergyReport, QUARTIC_MODE_BUDGET};
pub use lambda::{lambda_k, pair_coefficients, EnergyFunctionals, TUPLE_BUDGET};
pub use multiplier::{e2, IMultiplier, SquaredSymbol, TabulatedSymbol};
