//! Scaling plans, the unit-step energy iteration, growth runs and the ill-posedness probe.

mod illposed;
mod iteration;
mod plan;

pub use illposed::{illposed_probe, packet, probe_grid, IllposedConfig, IllposedReport, IllposedRow, FAMILY_LABEL};
pub use iteration::{
    e4_increments, growth_experiment, run_gwp_iteration, GrowthReport, GwpReport, IncrementRow, GROWTH_EXPONENT,
};
pub use plan::{lambda_exponent, n_exponent, scaling_lambda, select_scaling, GwpPlan, DEFAULT_EPS0};
