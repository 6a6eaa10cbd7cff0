//! Empirical checks of the harmonic-analysis estimates behind the energy method.

pub mod blocks;
pub mod bourgain;
pub mod ediff;
pub mod multipliers;
pub mod product;
pub mod report;
pub mod resonance;
pub mod strichartz;

pub use blocks::{
    admissible_configs, block_norm_estimate, block_sweep, inadmissible_configs, write_sweep_csv, BlockLattice,
    BlockSample, DyadicConfig, Regime, BLOCK_CONSTANT,
};
pub use bourgain::{
    bourgain_diagnostics, embedding_check, time_window, BourgainReport, EmbeddingSetup, EMBEDDING_CONSTANT,
};
pub use ediff::{ediff_check, ediff_field, log_slope, EDIFF_AMPLITUDES, EDIFF_CONSTANT};
pub use multipliers::{multiplier_bound_check, sample_hyperplane_tuple, MultiplierBound};
pub use product::{product_bound, product_estimate_probe, quintet_integral, random_quintet, Wave, PRODUCT_MODES};
pub use report::{BoundCheckReport, WorstCase};
pub use resonance::{resonance_check, resonance_sum, RESONANCE_FACTOR};
pub use strichartz::{free_mixed_norms, random_band_modes, strichartz_probe, MixedNorms};
