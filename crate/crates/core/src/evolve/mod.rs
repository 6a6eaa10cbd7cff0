//! Time integration, trajectories and the scaling map.

mod duhamel;
mod scaling;
mod solver;
mod trajectory;

pub use duhamel::duhamel_residual;
pub use scaling::{rescale_field, rescale_onto, rescale_params};
pub use solver::{cfl_dt, evolve_to, rhs_nonlinear, solve, step_ifrk4, Propagator, SolverConfig, Stepper};
pub use trajectory::{Scheme, Trajectory};
