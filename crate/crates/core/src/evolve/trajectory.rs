use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{l2_norm, momentum, RealField, SpectralGrid, SymbolParams};

use super::solver::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "IFRK4")]
    Ifrk4,
}

/// Recorded states of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    grid: SpectralGrid,
    params: SymbolParams,
    config: SolverConfig,
    dt: f64,
    scheme: Scheme,
    times: Vec<f64>,
    states: Vec<RealField>,
    l2_drift: Vec<f64>,
}

const FORMAT: &str = "benjamin-trajectory/1";

#[derive(Serialize, Deserialize)]
struct Manifest {
    format: String,
    grid: SpectralGrid,
    params: SymbolParams,
    config: SolverConfig,
    dt: f64,
    scheme: Scheme,
    times: Vec<f64>,
    l2_drift: Vec<f64>,
    states: Vec<String>,
}

impl Trajectory {
    pub fn new(grid: SpectralGrid, params: SymbolParams, config: SolverConfig, dt: f64, scheme: Scheme) -> Self {
        Trajectory { grid, params, config, dt, scheme, times: Vec::new(), states: Vec::new(), l2_drift: Vec::new() }
    }

    /// Appends a state; times must increase strictly.
    pub fn push(&mut self, t: f64, state: RealField) {
        assert!(self.times.last().is_none_or(|&last| t > last), "times must increase");
        let n = l2_norm(&state);
        let drift = match self.states.first() {
            Some(s0) => {
                let n0 = l2_norm(s0);
                if n0 > 0.0 {
                    (n - n0) / n0
                } else {
                    n
                }
            }
            None => 0.0,
        };
        self.times.push(t);
        self.states.push(state);
        self.l2_drift.push(drift);
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }
    pub fn params(&self) -> &SymbolParams {
        &self.params
    }
    pub fn config(&self) -> &SolverConfig {
        &self.config
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn states(&self) -> &[RealField] {
        &self.states
    }
    /// Relative change of the `L^2` norm against the first state, per recorded state.
    pub fn l2_drift(&self) -> &[f64] {
        &self.l2_drift
    }
    pub fn len(&self) -> usize {
        self.states.len()
    }
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
    pub fn last(&self) -> Option<&RealField> {
        self.states.last()
    }

    /// Largest relative `L^2` drift divided by the elapsed time.
    pub fn l2_drift_rate(&self) -> f64 {
        let span = self.times.last().copied().unwrap_or(0.0) - self.times.first().copied().unwrap_or(0.0);
        let worst = self.l2_drift.iter().fold(0.0f64, |a, d| a.max(d.abs()));
        if span > 0.0 {
            worst / span.max(1.0)
        } else {
            worst
        }
    }

    /// Largest absolute change of `int u dx` against the first state.
    pub fn momentum_drift(&self) -> f64 {
        let Some(first) = self.states.first() else { return 0.0 };
        let p0 = momentum(first);
        self.states.iter().map(|s| (momentum(s) - p0).abs()).fold(0.0, f64::max)
    }

    /// Writes `manifest.json` plus one `state_NNNNN.bin` per recorded state
    /// (little-endian f64, interleaved re/im, ascending modes).
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let names: Vec<String> = (0..self.states.len()).map(|i| format!("state_{i:05}.bin")).collect();
        for (name, state) in names.iter().zip(&self.states) {
            let mut w = BufWriter::new(fs::File::create(dir.join(name))?);
            for c in state.coeffs() {
                w.write_all(&c.re.to_le_bytes())?;
                w.write_all(&c.im.to_le_bytes())?;
            }
            w.flush()?;
        }
        let manifest = Manifest {
            format: FORMAT.to_string(),
            grid: self.grid.clone(),
            params: self.params,
            config: self.config.clone(),
            dt: self.dt,
            scheme: self.scheme,
            times: self.times.clone(),
            l2_drift: self.l2_drift.clone(),
            states: names,
        };
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Trajectory> {
        let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
        if manifest.format != FORMAT {
            return Err(Error::Format(format!("unknown format tag {:?}", manifest.format)));
        }
        if manifest.states.len() != manifest.times.len() {
            return Err(Error::Format("state and time counts differ".into()));
        }
        let n = manifest.grid.len();
        let mut states = Vec::with_capacity(manifest.states.len());
        for name in &manifest.states {
            let mut bytes = Vec::new();
            fs::File::open(dir.join(name))?.read_to_end(&mut bytes)?;
            if bytes.len() != 16 * n {
                return Err(Error::Format(format!("{name}: expected {} bytes, found {}", 16 * n, bytes.len())));
            }
            let coeffs: Vec<Complex64> = bytes
                .chunks_exact(16)
                .map(|b| {
                    let re = f64::from_le_bytes(b[..8].try_into().unwrap());
                    let im = f64::from_le_bytes(b[8..].try_into().unwrap());
                    Complex64::new(re, im)
                })
                .collect();
            states.push(RealField::new(manifest.grid.clone(), coeffs)?);
        }
        Ok(Trajectory {
            grid: manifest.grid,
            params: manifest.params,
            config: manifest.config,
            dt: manifest.dt,
            scheme: manifest.scheme,
            times: manifest.times,
            states,
            l2_drift: manifest.l2_drift,
        })
    }
}
