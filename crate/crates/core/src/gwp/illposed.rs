use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{Propagator, Stepper};
use crate::spectral::{sobolev_norm, RealField, SpectralGrid, SymbolParams};

/// Label written into every report: the data family is our own construction.
pub const FAMILY_LABEL: &str = "two-mode high-frequency packet (reconstructed family)";

/// Numerical setup of the probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IllposedConfig {
    pub t_end: f64,
    /// Step size as a fraction of `1 / Omega`, `Omega = 3 (Nf + 2)^2 (2 Nf + 4)`.
    pub phase_fraction: f64,
}

impl Default for IllposedConfig {
    fn default() -> Self {
        IllposedConfig { t_end: 1e-3, phase_fraction: 0.2 }
    }
}

/// One frequency of the probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IllposedRow {
    pub nf: usize,
    pub modes: usize,
    pub cutoff: usize,
    pub dt: f64,
    pub steps: usize,
    /// `H^s` norm of the finite-difference third derivative at `delta`; `None` if a solve blew up.
    pub norm: Option<f64>,
    /// The same at `delta / 2`.
    pub norm_half_delta: Option<f64>,
    /// Time of the first non-finite state, if any.
    pub escaped_at: Option<f64>,
}

impl IllposedRow {
    /// `|norm(delta/2) / norm(delta) - 1|`.
    pub fn consistency(&self) -> Option<f64> {
        match (self.norm, self.norm_half_delta) {
            (Some(a), Some(b)) if a > 0.0 => Some((b / a - 1.0).abs()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IllposedReport {
    pub family: String,
    pub s: f64,
    pub delta: f64,
    pub config: IllposedConfig,
    pub rows: Vec<IllposedRow>,
}

impl IllposedReport {
    pub fn norms(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.norm).collect()
    }
}

/// Grid for frequency `Nf`: period `2 pi`, `K = 3 (Nf + 4)` modes, products kept up to `2 Nf + 8`.
pub fn probe_grid(nf: usize) -> Result<SpectralGrid> {
    SpectralGrid::with_cutoff(3 * (nf + 4), TAU, 2 * nf + 8)
}

/// `phi` with coefficient `Nf^{-s - 1/2}` on `|m| in [Nf, Nf + 2]`.
pub fn packet(grid: &SpectralGrid, nf: usize, s: f64) -> RealField {
    let a = (nf as f64).powf(-s - 0.5);
    let mut f = RealField::zeros(grid);
    for m in nf..=nf + 2 {
        f.set_mode(m as i64, Complex64::new(a, 0.0));
    }
    f
}

fn step_size(nf: usize, cfg: &IllposedConfig) -> (f64, usize) {
    let n = nf as f64;
    let omega = 3.0 * (n + 2.0) * (n + 2.0) * (2.0 * n + 4.0);
    let steps = (cfg.t_end * omega / cfg.phase_fraction).ceil().max(1.0) as usize;
    (cfg.t_end / steps as f64, steps)
}

fn solve_to(stepper: &Stepper, u0: &RealField, steps: usize, dt: f64) -> std::result::Result<Vec<Complex64>, f64> {
    let mut prop = Propagator::new(stepper, u0.coeffs());
    for n in 1..=steps {
        prop.step();
        if !prop.is_finite() {
            return Err(n as f64 * dt);
        }
    }
    Ok(prop.state())
}

/// `(u(2d) - 2u(d) + 2u(-d) - u(-2d)) / (2 d^3)` at the final time, in `H^s`.
fn third_difference(
    stepper: &Stepper,
    phi: &RealField,
    delta: f64,
    steps: usize,
    dt: f64,
    s: f64,
) -> std::result::Result<f64, f64> {
    let weights = [(2.0, 1.0), (1.0, -2.0), (-1.0, 2.0), (-2.0, -1.0)];
    let finals: Vec<std::result::Result<Vec<Complex64>, f64>> =
        weights.par_iter().map(|&(k, _)| solve_to(stepper, &phi.scaled(k * delta), steps, dt)).collect();
    let grid = phi.grid();
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for ((_, w), f) in weights.iter().zip(finals) {
        for (a, z) in acc.iter_mut().zip(f?) {
            *a += z * *w;
        }
    }
    let scale = 1.0 / (2.0 * delta.powi(3));
    let d3 = RealField::from_parts_unchecked(grid.clone(), acc.into_iter().map(|z| z * scale).collect());
    Ok(sobolev_norm(&d3, s))
}

/// Finite-difference estimate of the third derivative of the data-to-solution map at 0
/// in direction `phi_Nf`, for every `Nf` in `freqs`.
pub fn illposed_probe(
    params: &SymbolParams,
    s: f64,
    freqs: &[usize],
    delta: f64,
    cfg: &IllposedConfig,
) -> Result<IllposedReport> {
    if !(s < 0.0) {
        return Err(Error::invalid("the probe needs s < 0"));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid("delta must be finite and nonnegative"));
    }
    if !(cfg.t_end > 0.0 && cfg.phase_fraction > 0.0) {
        return Err(Error::invalid("t_end and phase_fraction must be positive"));
    }
    let mut rows = Vec::with_capacity(freqs.len());
    for &nf in freqs {
        if nf == 0 {
            return Err(Error::invalid("frequencies must be positive"));
        }
        let grid = probe_grid(nf)?;
        let (dt, steps) = step_size(nf, cfg);
        let mut row = IllposedRow {
            nf,
            modes: grid.modes(),
            cutoff: grid.dealias_cutoff(),
            dt,
            steps,
            norm: Some(0.0),
            norm_half_delta: Some(0.0),
            escaped_at: None,
        };
        if delta > 0.0 {
            let stepper = Stepper::new(&grid, params, dt, true, true);
            let phi = packet(&grid, nf, s);
            for (d, slot) in [(delta, 0), (delta / 2.0, 1)] {
                let value = match third_difference(&stepper, &phi, d, steps, dt, s) {
                    Ok(v) => Some(v),
                    Err(t) => {
                        row.escaped_at = Some(row.escaped_at.map_or(t, |e: f64| e.min(t)));
                        None
                    }
                };
                if slot == 0 {
                    row.norm = value;
                } else {
                    row.norm_half_delta = value;
                }
            }
        }
        rows.push(row);
    }
    Ok(IllposedReport { family: FAMILY_LABEL.to_string(), s, delta, config: *cfg, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    /// `c t^pow e^{i w t}` attached to one mode.
    #[derive(Clone, Copy)]
    struct Term {
        c: Complex64,
        w: f64,
        linear_in_t: bool,
    }

    type Series = BTreeMap<i64, Vec<Term>>;

    /// `-i xi int_0^t e^{i p (t - r)} F(r) dr` for `F` a sum of pure exponentials.
    fn duhamel(params: &SymbolParams, forcing: &BTreeMap<i64, Vec<(Complex64, f64)>>, cutoff: i64) -> Series {
        let mut out = Series::new();
        for (&m, terms) in forcing {
            if m == 0 || m.abs() > cutoff {
                continue;
            }
            let xi = m as f64;
            let p = params.p(xi);
            let mut acc = Vec::new();
            for &(c, w) in terms {
                let d = w - p;
                let k = Complex64::new(0.0, -xi) * c;
                if d.abs() < 1e-9 * w.abs().max(1.0) {
                    acc.push(Term { c: k, w: p, linear_in_t: true });
                } else {
                    let q = k / Complex64::new(0.0, d);
                    acc.push(Term { c: q, w, linear_in_t: false });
                    acc.push(Term { c: -q, w: p, linear_in_t: false });
                }
            }
            out.insert(m, acc);
        }
        out
    }

    fn product(a: &Series, b: &Series, factor: f64) -> BTreeMap<i64, Vec<(Complex64, f64)>> {
        let mut f: BTreeMap<i64, Vec<(Complex64, f64)>> = BTreeMap::new();
        for (&ma, ta) in a {
            for (&mb, tb) in b {
                for x in ta {
                    for y in tb {
                        assert!(!x.linear_in_t && !y.linear_in_t);
                        f.entry(ma + mb).or_default().push((x.c * y.c * factor, x.w + y.w));
                    }
                }
            }
        }
        f
    }

    /// `6 u_3(t)` for the packet, from the exact second and third Picard iterates.
    fn third_iterate_norm(params: &SymbolParams, nf: usize, s: f64, t: f64, cutoff: i64) -> f64 {
        let a = (nf as f64).powf(-s - 0.5);
        let mut u1 = Series::new();
        for m in nf as i64..=nf as i64 + 2 {
            for mm in [m, -m] {
                u1.insert(mm, vec![Term { c: Complex64::new(a, 0.0), w: params.p(mm as f64), linear_in_t: false }]);
            }
        }
        let u2 = duhamel(params, &product(&u1, &u1, 1.0), cutoff);
        let u3 = duhamel(params, &product(&u1, &u2, 2.0), cutoff);
        let mut acc = 0.0;
        for (&m, terms) in &u3 {
            let v: Complex64 =
                terms.iter().map(|x| x.c * Complex64::from_polar(if x.linear_in_t { t } else { 1.0 }, x.w * t)).sum();
            acc += (1.0 + (m * m) as f64).powf(s) * (6.0 * v).norm_sqr();
        }
        (TAU * acc).sqrt()
    }

    #[test]
    fn matches_the_exact_third_iterate() {
        let p = SymbolParams::new(0.5, 1.0, 0.0).unwrap();
        let cfg = IllposedConfig { t_end: 2e-2, phase_fraction: 0.1 };
        for (nf, s) in [(4usize, -1.0), (8, -0.5)] {
            let rep = illposed_probe(&p, s, &[nf], 1e-3, &cfg).unwrap();
            let fd = rep.rows[0].norm.unwrap();
            let exact = third_iterate_norm(&p, nf, s, cfg.t_end, (2 * nf + 8) as i64);
            assert!((fd / exact - 1.0).abs() < 1e-3, "Nf {nf}: {fd} vs {exact}");
            assert!(rep.rows[0].consistency().unwrap() < 0.1);
        }
    }

    #[test]
    fn zero_delta_gives_the_zero_map() {
        let p = SymbolParams::airy();
        let rep = illposed_probe(&p, -1.0, &[16, 32], 0.0, &IllposedConfig::default()).unwrap();
        assert!(rep.rows.iter().all(|r| r.norm == Some(0.0)));
    }

    #[test]
    fn packet_has_the_prescribed_coefficients() {
        let g = probe_grid(16).unwrap();
        assert_eq!(g.modes(), 60);
        assert_eq!(g.dealias_cutoff(), 40);
        let f = packet(&g, 16, -1.0);
        assert_eq!(f.coeff(17).re, 16f64.powf(0.5));
        assert_eq!(f.coeff(-18).re, 16f64.powf(0.5));
        assert_eq!(f.coeff(19), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_nonnegative_regularity() {
        let p = SymbolParams::airy();
        assert!(illposed_probe(&p, 0.0, &[16], 1e-3, &IllposedConfig::default()).is_err());
    }
}
