use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::Trajectory;
use crate::spectral::{RealField, SymbolParams};

use super::corrections::Corrections;
use super::lambda::EnergyFunctionals;
use super::multiplier::{e2, IMultiplier, SquaredSymbol};

/// Largest `K` for which the quartic correction is evaluated.
pub const QUARTIC_MODE_BUDGET: usize = 256;

/// `E_I^2`, `E_I^3 = E_I^2 + Lambda_3(sigma3)` and `E_I^4 = E_I^3 + Lambda_4(sigma4)` at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Energies {
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    /// Largest `|Im| / |Re|` of the two correction sums.
    pub imag_residue: f64,
}

pub fn energies_at<S: SquaredSymbol>(corr: &Corrections<S>, u: &RealField) -> Energies {
    let f = EnergyFunctionals::new(corr);
    let e2 = e2(corr.symbol(), u);
    let l3 = f.lambda3_sigma3(u);
    let l4 = f.lambda4_sigma4(u);
    let rel = |z: num_complex::Complex64| if z.re == 0.0 { z.im.abs() } else { (z.im / z.re).abs() };
    Energies { e2, e3: e2 + l3.re, e4: e2 + l3.re + l4.re, imag_residue: rel(l3).max(rel(l4)) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub n: f64,
    pub s: f64,
    pub alpha: f64,
    pub times: Vec<f64>,
    pub e2: Vec<f64>,
    pub e3: Vec<f64>,
    pub e4: Vec<f64>,
    pub e4_minus_e40: Vec<f64>,
    pub imag_residue: f64,
}

impl EnergyReport {
    pub fn from_samples(im: &IMultiplier, alpha: f64, times: Vec<f64>, samples: &[Energies]) -> Self {
        let e40 = samples.first().map(|e| e.e4).unwrap_or(0.0);
        EnergyReport {
            n: im.n(),
            s: im.s(),
            alpha,
            times,
            e2: samples.iter().map(|e| e.e2).collect(),
            e3: samples.iter().map(|e| e.e3).collect(),
            e4: samples.iter().map(|e| e.e4).collect(),
            e4_minus_e40: samples.iter().map(|e| e.e4 - e40).collect(),
            imag_residue: samples.iter().map(|e| e.imag_residue).fold(0.0, f64::max),
        }
    }

    /// RFC 4180 CSV with header `t,e2,e3,e4,e4_minus_e40`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "e2", "e3", "e4", "e4_minus_e40"]).map_err(|e| Error::Format(e.to_string()))?;
        for i in 0..self.times.len() {
            w.write_record(&[
                format!("{:e}", self.times[i]),
                format!("{:e}", self.e2[i]),
                format!("{:e}", self.e3[i]),
                format!("{:e}", self.e4[i]),
                format!("{:e}", self.e4_minus_e40[i]),
            ])
            .map_err(|e| Error::Format(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Evaluates the three energies at every recorded state of `traj`.
pub fn modified_energies(im: &IMultiplier, params: &SymbolParams, traj: &Trajectory) -> Result<EnergyReport> {
    let grid = traj.grid();
    if grid.modes() > QUARTIC_MODE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "quartic energy modes",
            needed: grid.modes(),
            limit: QUARTIC_MODE_BUDGET,
        });
    }
    let mut corr = Corrections::new(*im, params)?;
    if traj.config().dealias && traj.config().nonlinear {
        corr = corr.with_pair_cutoff(grid.cutoff_wavenumber());
    }
    let corr = corr.tabulated(grid, 4 * grid.modes());
    let samples: Vec<Energies> = traj.states().par_iter().map(|u| energies_at(&corr, u)).collect();
    Ok(EnergyReport::from_samples(im, params.alpha, traj.times().to_vec(), &samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{solve, SolverConfig};
    use crate::rng::seeded;
    use crate::spectral::{random_gaussian, SpectralGrid};

    #[test]
    fn corrections_vanish_below_n() {
        let g = SpectralGrid::new(32, 2.0 * std::f64::consts::PI).unwrap();
        let p = SymbolParams::new(0.5, 1.0, 0.0).unwrap();
        let im = IMultiplier::new(10.0, -0.75).unwrap();
        let corr = Corrections::new(im, &p).unwrap();
        let narrow = random_gaussian(&g, 5, &mut seeded(1, 0)).scaled(0.1);
        let e = energies_at(&corr, &narrow);
        assert_eq!(e.e2, e.e3);
        assert_eq!(e.e2, e.e4);
        // pair sums up to 20 exceed N, so only the cubic correction stays zero
        let wide = random_gaussian(&g, 10, &mut seeded(1, 0)).scaled(0.1);
        let e = energies_at(&corr, &wide);
        assert_eq!(e.e2, e.e3);
        assert!(e.e4 != e.e3);
    }

    #[test]
    fn report_serialises() {
        let g = SpectralGrid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let u = random_gaussian(&g, 8, &mut seeded(2, 0)).scaled(0.05);
        let p = SymbolParams::new(0.5, 1.0, 0.0).unwrap();
        let traj = solve(&u, &p, &SolverConfig::new(0.01, 0.05, 1).unwrap()).unwrap();
        let im = IMultiplier::new(2.0, -0.5).unwrap();
        let rep = modified_energies(&im, &p, &traj).unwrap();
        assert_eq!(rep.times.len(), traj.len());
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,e2,e3,e4,e4_minus_e40\n"));
        assert_eq!(text.lines().count(), traj.len() + 1);
        assert!(rep.e2.iter().all(|&v| v >= 0.0));
        assert!(rep.imag_residue < 1e-10);
    }
}
