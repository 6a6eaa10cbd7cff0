use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use benjamin_core::evolve::SolverConfig;
use benjamin_core::gwp::{IllposedConfig, DEFAULT_EPS0};
use benjamin_core::imethod::{IMultiplier, QUARTIC_MODE_BUDGET};
use benjamin_core::rng::seeded;
use benjamin_core::spectral::{random_gaussian, random_power_law};
use benjamin_core::{RealField, SpectralGrid, SymbolParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Schema identifier every config file must carry in its `schema` field.
pub const SCHEMA_ID: &str = "benjamin-lab/config/v1";

/// Largest grid accepted by any experiment.
const MAX_MODES: usize = 4096;
const MAX_SAMPLES: f64 = 1e7;
const MAX_MULTIPLIER_MODE: f64 = 1e5;
const MAX_BLOCK_KMAX: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Simulate,
    Energies,
    VerifyMultipliers,
    VerifyBlocks,
    Growth,
    IllposedProbe,
    Gwp,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Simulate => "simulate",
            Kind::Energies => "energies",
            Kind::VerifyMultipliers => "verify-multipliers",
            Kind::VerifyBlocks => "verify-blocks",
            Kind::Growth => "growth",
            Kind::IllposedProbe => "illposed-probe",
            Kind::Gwp => "gwp",
        }
    }

    /// Experiments that evaluate the modified energies.
    fn uses_energies(self) -> bool {
        matches!(self, Kind::Energies | Kind::Gwp)
    }
}

/// A validation failure, tagged with the dotted path of the offending field.
#[derive(Debug, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

fn bad(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { field: field.to_string(), message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub modes: usize,
    #[serde(default = "default_length")]
    pub length: f64,
    /// Defaults to two thirds of `modes`.
    #[serde(default)]
    pub dealias_cutoff: Option<usize>,
}

fn default_length() -> f64 {
    TAU
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { modes: 64, length: TAU, dealias_cutoff: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        ParamsSection { alpha: 0.5, beta: 1.0, gamma: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default = "yes")]
    pub dealias: bool,
    #[serde(default = "yes")]
    pub nonlinear: bool,
}

fn default_stride() -> usize {
    100
}

fn yes() -> bool {
    true
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection { dt: 1e-3, t_end: 1.0, record_stride: 100, dealias: true, nonlinear: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IMethodSection {
    pub n: f64,
    pub s: f64,
}

impl Default for IMethodSection {
    fn default() -> Self {
        IMethodSection { n: 8.0, s: -0.75 }
    }
}

/// Initial data, drawn from the stream `(seed, 0)` when random.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataSection {
    /// `|c(xi)| = amplitude <xi>^{-decay}` with random phases on `1 <= |m| <= band`.
    PowerLaw {
        #[serde(default)]
        band: Option<usize>,
        #[serde(default = "default_decay")]
        decay: f64,
        amplitude: f64,
    },
    /// Complex Gaussian coefficients scaled by `amplitude`.
    Gaussian {
        #[serde(default)]
        band: Option<usize>,
        amplitude: f64,
    },
    SingleMode {
        mode: i64,
        amplitude: f64,
    },
    Zero,
}

fn default_decay() -> f64 {
    1.0
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection::PowerLaw { band: None, decay: 1.0, amplitude: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GwpSection {
    pub t_target: f64,
    #[serde(default = "default_eps0")]
    pub eps0: f64,
    /// Fixed `N`; when absent the smallest admissible dyadic `N` is selected.
    #[serde(default)]
    pub n: Option<f64>,
    #[serde(default = "default_gwp_dt")]
    pub dt: f64,
}

fn default_eps0() -> f64 {
    DEFAULT_EPS0
}

fn default_gwp_dt() -> f64 {
    1e-3
}

impl Default for GwpSection {
    fn default() -> Self {
        GwpSection { t_target: 1.0, eps0: DEFAULT_EPS0, n: None, dt: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IllposedSection {
    pub s: f64,
    pub freqs: Vec<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub probe: IllposedConfig,
}

fn default_delta() -> f64 {
    1e-3
}

impl Default for IllposedSection {
    fn default() -> Self {
        IllposedSection { s: -1.0, freqs: vec![16, 32, 64, 128], delta: 1e-3, probe: IllposedConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSection {
    /// Largest accepted `sup_t ||u(t)|| / ((1 + t) ||u_0||)`.
    pub constant: f64,
}

impl Default for GrowthSection {
    fn default() -> Self {
        GrowthSection { constant: 1.0 }
    }
}

/// Sample counts and sweep sizes; each may also be set with `--budget KEY=VALUE`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    pub sigma3_samples: f64,
    pub m4_samples: f64,
    pub m5_samples: f64,
    pub max_mode: f64,
    pub block_configs: f64,
    pub block_kmax: f64,
    pub block_trials: f64,
    /// Largest number of unit steps a GWP plan may ask for.
    pub gwp_unit_steps: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            sigma3_samples: 1e5,
            m4_samples: 1e5,
            m5_samples: 1e4,
            max_mode: 128.0,
            block_configs: 50.0,
            block_kmax: 6.0,
            block_trials: 256.0,
            gwp_unit_steps: 1e4,
        }
    }
}

impl Budgets {
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        let slot = match key {
            "sigma3_samples" => &mut self.sigma3_samples,
            "m4_samples" => &mut self.m4_samples,
            "m5_samples" => &mut self.m5_samples,
            "max_mode" => &mut self.max_mode,
            "block_configs" => &mut self.block_configs,
            "block_kmax" => &mut self.block_kmax,
            "block_trials" => &mut self.block_trials,
            "gwp_unit_steps" => &mut self.gwp_unit_steps,
            _ => return Err(bad(&format!("budgets.{key}"), "unknown budget")),
        };
        *slot = value;
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let counts = [
            ("sigma3_samples", self.sigma3_samples, MAX_SAMPLES),
            ("m4_samples", self.m4_samples, MAX_SAMPLES),
            ("m5_samples", self.m5_samples, MAX_SAMPLES),
            ("max_mode", self.max_mode, MAX_MULTIPLIER_MODE),
            ("block_configs", self.block_configs, 1e4),
            ("block_kmax", self.block_kmax, MAX_BLOCK_KMAX),
            ("block_trials", self.block_trials, 1e5),
            ("gwp_unit_steps", self.gwp_unit_steps, 1e6),
        ];
        for (name, v, limit) in counts {
            if !(v >= 1.0 && v <= limit && v.fract() == 0.0) {
                return Err(bad(&format!("budgets.{name}"), format!("must be an integer in [1, {limit:e}], got {v}")));
            }
        }
        if self.max_mode < 2.0 {
            return Err(bad("budgets.max_mode", "must be at least 2"));
        }
        Ok(())
    }
}

/// Full description of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    /// When present it must match the subcommand.
    #[serde(default)]
    pub kind: Option<Kind>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub imethod: IMethodSection,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub gwp: GwpSection,
    #[serde(default)]
    pub illposed: IllposedSection,
    #[serde(default)]
    pub growth: GrowthSection,
}

fn default_seed() -> u64 {
    1
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema: SCHEMA_ID.to_string(),
            kind: None,
            grid: GridSection::default(),
            params: ParamsSection::default(),
            solver: SolverSection::default(),
            imethod: IMethodSection::default(),
            data: DataSection::default(),
            seed: default_seed(),
            budgets: Budgets::default(),
            output_dir: None,
            gwp: GwpSection::default(),
            illposed: IllposedSection::default(),
            growth: GrowthSection::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses JSON; syntax and type errors carry the line and column of the problem.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| bad(&origin.display().to_string(), e.to_string()))?;
        if cfg.schema != SCHEMA_ID {
            return Err(bad("schema", format!("expected {SCHEMA_ID:?}, got {:?}", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(&path.display().to_string(), e.to_string()))?;
        Self::from_json(&text, path)
    }

    pub fn validate(&self, kind: Kind) -> Result<(), ConfigError> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(bad(
                    "kind",
                    format!("config is for {:?} but the subcommand is {:?}", k.name(), kind.name()),
                ));
            }
        }
        if self.grid.modes == 0 || self.grid.modes > MAX_MODES {
            return Err(bad("grid.modes", format!("must lie in [1, {MAX_MODES}], got {}", self.grid.modes)));
        }
        if kind.uses_energies() && self.grid.modes > QUARTIC_MODE_BUDGET {
            return Err(bad(
                "grid.modes",
                format!("energy experiments allow at most {QUARTIC_MODE_BUDGET} modes, got {}", self.grid.modes),
            ));
        }
        self.grid().map_err(|e| bad("grid", e.to_string()))?;
        self.params().map_err(|e| bad("params", e.to_string()))?;
        self.solver_config().map_err(|e| bad("solver", e.to_string()))?;
        if matches!(kind, Kind::Energies | Kind::Gwp | Kind::VerifyMultipliers | Kind::Simulate) {
            IMultiplier::new(self.imethod.n, self.imethod.s).map_err(|e| bad("imethod", e.to_string()))?;
        }
        self.validate_data()?;
        self.budgets.validate()?;
        match kind {
            Kind::Gwp => {
                let g = &self.gwp;
                if !(g.t_target.is_finite() && g.t_target > 0.0) {
                    return Err(bad("gwp.t_target", "must be positive"));
                }
                if !(g.eps0 > 0.0 && g.eps0 < 1.0) {
                    return Err(bad("gwp.eps0", "must lie in (0, 1)"));
                }
                if g.n.is_some_and(|n| !(n.is_finite() && n >= 1.0)) {
                    return Err(bad("gwp.n", "must be at least 1"));
                }
                if !(g.dt > 0.0 && g.dt <= 1.0) {
                    return Err(bad("gwp.dt", "must lie in (0, 1]"));
                }
            }
            Kind::IllposedProbe => {
                let p = &self.illposed;
                if !(p.s < 0.0) {
                    return Err(bad("illposed.s", "must be negative"));
                }
                if p.freqs.is_empty() || p.freqs.contains(&0) {
                    return Err(bad("illposed.freqs", "needs at least one positive frequency"));
                }
                if p.freqs.iter().any(|&f| 3 * (f + 4) > MAX_MODES) {
                    return Err(bad(
                        "illposed.freqs",
                        format!("frequencies above {} exceed the grid limit", MAX_MODES / 3 - 4),
                    ));
                }
                if !(p.delta.is_finite() && p.delta >= 0.0) {
                    return Err(bad("illposed.delta", "must be finite and nonnegative"));
                }
                if !(p.probe.t_end > 0.0 && p.probe.phase_fraction > 0.0) {
                    return Err(bad("illposed.probe", "t_end and phase_fraction must be positive"));
                }
            }
            Kind::Growth => {
                if !(self.growth.constant > 0.0) {
                    return Err(bad("growth.constant", "must be positive"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn validate_data(&self) -> Result<(), ConfigError> {
        let amp_ok = |a: f64| a.is_finite() && a >= 0.0;
        match &self.data {
            DataSection::PowerLaw { decay, amplitude, band } => {
                if !decay.is_finite() {
                    return Err(bad("data.decay", "must be finite"));
                }
                if !amp_ok(*amplitude) {
                    return Err(bad("data.amplitude", "must be finite and nonnegative"));
                }
                if band.is_some_and(|b| b > self.grid.modes) {
                    return Err(bad("data.band", "exceeds grid.modes"));
                }
            }
            DataSection::Gaussian { amplitude, band } => {
                if !amp_ok(*amplitude) {
                    return Err(bad("data.amplitude", "must be finite and nonnegative"));
                }
                if band.is_some_and(|b| b > self.grid.modes) {
                    return Err(bad("data.band", "exceeds grid.modes"));
                }
            }
            DataSection::SingleMode { mode, amplitude } => {
                if *mode == 0 || mode.unsigned_abs() as usize > self.grid.modes {
                    return Err(bad("data.mode", "must be nonzero and within the grid"));
                }
                if !amplitude.is_finite() {
                    return Err(bad("data.amplitude", "must be finite"));
                }
            }
            DataSection::Zero => {}
        }
        Ok(())
    }

    pub fn grid(&self) -> benjamin_core::Result<SpectralGrid> {
        match self.grid.dealias_cutoff {
            Some(c) => SpectralGrid::with_cutoff(self.grid.modes, self.grid.length, c),
            None => SpectralGrid::new(self.grid.modes, self.grid.length),
        }
    }

    pub fn params(&self) -> benjamin_core::Result<SymbolParams> {
        SymbolParams::relaxed(self.params.alpha, self.params.beta, self.params.gamma)
    }

    pub fn solver_config(&self) -> benjamin_core::Result<SolverConfig> {
        let s = &self.solver;
        let mut cfg = SolverConfig::new(s.dt, s.t_end, s.record_stride)?;
        cfg.dealias = s.dealias;
        cfg.nonlinear = s.nonlinear;
        Ok(cfg)
    }

    pub fn multiplier(&self) -> benjamin_core::Result<IMultiplier> {
        IMultiplier::new(self.imethod.n, self.imethod.s)
    }

    pub fn initial_data(&self) -> benjamin_core::Result<RealField> {
        let grid = self.grid()?;
        let mut rng = seeded(self.seed, 0);
        let cutoff = grid.dealias_cutoff();
        Ok(match &self.data {
            DataSection::PowerLaw { band, decay, amplitude } => {
                random_power_law(&grid, band.unwrap_or(cutoff), *decay, *amplitude, &mut rng)
            }
            DataSection::Gaussian { band, amplitude } => {
                random_gaussian(&grid, band.unwrap_or(cutoff), &mut rng).scaled(*amplitude)
            }
            DataSection::SingleMode { mode, amplitude } => {
                RealField::single_mode(&grid, *mode, Complex64::new(*amplitude, 0.0))
            }
            DataSection::Zero => RealField::zeros(&grid),
        })
    }
}
