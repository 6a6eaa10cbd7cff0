use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::report::{BoundCheckReport, WorstCase};
use crate::error::{Error, Result};
use crate::evolve::{solve, SolverConfig, Trajectory};
use crate::rng::seeded;
use crate::spectral::{
    covering_index, eta_bump, l2_norm, random_power_law, smoothstep, sobolev_norm, NormReport, RealField, SpectralGrid,
    SymbolParams, Transform,
};

/// Fewest recorded states accepted inside the window.
pub const MIN_WINDOW_SAMPLES: usize = 16;
/// Stored constant for `||psi u||_{L_t^inf H^s} <= C ||psi u||_{F^s}`.
pub const EMBEDDING_CONSTANT: f64 = 1.0;

/// Space-time diagnostics of one trajectory over a time window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BourgainReport {
    /// `l2` and `sobolev` are sups over the window of `psi(t)` times the norm;
    /// `fbar` and `xbar0` are the space-time norms of `psi u`.
    pub norms: NormReport,
    pub s: f64,
    pub window: (f64, f64),
    pub samples: usize,
    /// `int ||psi u||_{L^2}^2 dt` as recovered from the space-time transform.
    pub energy: f64,
    /// `||eta_k(xi) F(psi u)||_{X_k}` for `k = 0, 1, ...`.
    pub xk: Vec<f64>,
    /// Share of the space-time energy in each modulation bump `eta_j(tau - p(xi))`.
    pub modulation_fraction: Vec<f64>,
    /// `sup_t ||psi u||_{H^s} / ||psi u||_{F^s}`, zero for the zero trajectory.
    pub embedding_ratio: f64,
}

/// `C^2` window equal to 1 on the middle half of `[t0, t1]`.
pub fn time_window(t: f64, t0: f64, t1: f64) -> f64 {
    let r = (t - t0) / (t1 - t0);
    if !(0.0..=1.0).contains(&r) {
        0.0
    } else if r < 0.25 {
        smoothstep(4.0 * r)
    } else if r > 0.75 {
        smoothstep(4.0 * (1.0 - r))
    } else {
        1.0
    }
}

fn window_indices(times: &[f64], t0: f64, t1: f64) -> Result<Vec<usize>> {
    let tol = 1e-9 * (t1 - t0).abs().max(1.0);
    let idx: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= t0 - tol && times[i] <= t1 + tol).collect();
    if idx.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_WINDOW_SAMPLES, got: idx.len() });
    }
    let h = times[idx[1]] - times[idx[0]];
    for w in idx.windows(2) {
        if ((times[w[1]] - times[w[0]]) - h).abs() > 1e-6 * h {
            return Err(Error::invalid("recorded times inside the window are not uniformly spaced"));
        }
    }
    Ok(idx)
}

/// Windowed space-time analysis of a trajectory.
///
/// Each mode is moved to the interaction picture `e^{-i p(xi) t} c(xi, t)`, so the
/// time transform is directly a function of the modulation `sigma = tau - p(xi)`.
/// The series is zero-padded to twice its length before the FFT. Energies are
/// normalised so that their total equals `int ||psi u||_{L^2}^2 dt`.
pub fn bourgain_diagnostics(traj: &Trajectory, s: f64, window: (f64, f64)) -> Result<BourgainReport> {
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Err(Error::invalid("window must have t1 > t0"));
    }
    let times = traj.times();
    let idx = window_indices(times, t0, t1)?;
    let n = idx.len();
    let dt = times[idx[1]] - times[idx[0]];
    let grid = traj.grid();
    let params = traj.params();
    let kmax = grid.modes() as i64;
    let length = grid.length();
    let psi: Vec<f64> = idx.iter().map(|&i| time_window(times[i], t0, t1)).collect();

    let padded = 2 * n;
    let fft = FftPlanner::new().plan_fft_forward(padded);
    let sigma: Vec<f64> = (0..padded)
        .map(|r| {
            let r = if r < padded / 2 { r as f64 } else { r as f64 - padded as f64 };
            TAU * r / (padded as f64 * dt)
        })
        .collect();
    let jmax = covering_index(sigma.iter().fold(0.0, |a: f64, b| a.max(b.abs()))) as usize;
    let kcap = covering_index(grid.max_wavenumber()) as usize;

    // energy[k][j] = sum over modes and modulations of eta_k^2 eta_j^2 E, plus the eta_j-weighted totals.
    let rows: Vec<(Vec<Vec<f64>>, Vec<f64>)> = (0..=kmax)
        .into_par_iter()
        .map(|m| {
            let xi = grid.wavenumber(m);
            let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); padded];
            for (q, &i) in idx.iter().enumerate() {
                let t = times[i];
                buf[q] = traj.states()[i].coeff(m) * Complex64::from_polar(psi[q], -params.p(xi) * t);
            }
            fft.process(&mut buf);
            let weight = if m == 0 { 1.0 } else { 2.0 };
            let scale = weight * length * dt / padded as f64;
            let mut ek = vec![vec![0.0; jmax + 1]; kcap + 1];
            let mut share = vec![0.0; jmax + 1];
            let etak: Vec<f64> = (0..=kcap).map(|k| eta_bump(xi, k as i32)).collect();
            for (r, z) in buf.iter().enumerate() {
                let e = scale * z.norm_sqr();
                if e == 0.0 {
                    continue;
                }
                for j in 0..=jmax {
                    let eta = eta_bump(sigma[r], j as i32);
                    if eta == 0.0 {
                        continue;
                    }
                    share[j] += eta * e;
                    for k in 0..=kcap {
                        ek[k][j] += etak[k] * etak[k] * eta * eta * e;
                    }
                }
            }
            (ek, share)
        })
        .collect();
    let mut energy = vec![vec![0.0; jmax + 1]; kcap + 1];
    let mut share = vec![0.0; jmax + 1];
    for (ek, sh) in &rows {
        for k in 0..=kcap {
            for j in 0..=jmax {
                energy[k][j] += ek[k][j];
            }
        }
        for j in 0..=jmax {
            share[j] += sh[j];
        }
    }
    let total: f64 = share.iter().sum();
    let modulation_fraction: Vec<f64> = share.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect();
    let xk: Vec<f64> = energy
        .iter()
        .map(|row| row.iter().enumerate().map(|(j, e)| 2f64.powf(j as f64 / 2.0) * e.sqrt()).sum())
        .collect();

    let xbar0 = low_maximal_norm(traj, &idx, &psi);
    let high: f64 = xk.iter().enumerate().skip(1).map(|(k, x)| 2f64.powf(2.0 * s * k as f64) * x * x).sum();
    let fbar = (high + xbar0 * xbar0).sqrt();

    let mut sup_hs: f64 = 0.0;
    let mut sup_l2: f64 = 0.0;
    for (q, &i) in idx.iter().enumerate() {
        let u = &traj.states()[i];
        sup_hs = sup_hs.max(psi[q] * sobolev_norm(u, s));
        sup_l2 = sup_l2.max(psi[q] * l2_norm(u));
    }
    let embedding_ratio = if fbar > 0.0 { sup_hs / fbar } else { 0.0 };
    Ok(BourgainReport {
        norms: NormReport { l2: sup_l2, sobolev: vec![(s, sup_hs)], fbar: Some(fbar), xbar0: Some(xbar0) },
        s,
        window,
        samples: n,
        energy: total,
        xk,
        modulation_fraction,
        embedding_ratio,
    })
}

/// `||P_0 (psi u)||_{L_x^2 L_t^inf}` over the recorded times and the physical grid.
fn low_maximal_norm(traj: &Trajectory, idx: &[usize], psi: &[f64]) -> f64 {
    let grid = traj.grid();
    let tr = Transform::new(grid);
    let mut sup = vec![0.0f64; tr.len()];
    for (q, &i) in idx.iter().enumerate() {
        let low = traj.states()[i].apply_real_symbol(|xi| eta_bump(xi, 0));
        for (a, v) in sup.iter_mut().zip(tr.to_physical(low.coeffs())) {
            *a = a.max((psi[q] * v).abs());
        }
    }
    let h = grid.length() / sup.len() as f64;
    (h * sup.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// Setup of the rough-data embedding sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSetup {
    pub modes: usize,
    pub length: f64,
    pub amplitude: f64,
    pub decay: f64,
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    pub s: f64,
}

impl Default for EmbeddingSetup {
    fn default() -> Self {
        EmbeddingSetup {
            modes: 64,
            length: TAU,
            amplitude: 0.3,
            decay: 0.25,
            dt: 1e-3,
            t_end: 2.0,
            record_stride: 1,
            s: -0.75,
        }
    }
}

/// Embedding ratios of `runs` seeded rough-data solutions against [`EMBEDDING_CONSTANT`].
pub fn embedding_check(
    params: &SymbolParams,
    setup: &EmbeddingSetup,
    runs: usize,
    seed: u64,
) -> Result<BoundCheckReport> {
    let grid = SpectralGrid::new(setup.modes, setup.length)?;
    let cfg = SolverConfig::new(setup.dt, setup.t_end, setup.record_stride)?;
    let ratios: Vec<Result<f64>> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeded(seed, r as u64);
            let band = grid.dealias_cutoff();
            let amp = setup.amplitude * (0.5 + rng.random::<f64>());
            let u0: RealField = random_power_law(&grid, band, setup.decay, amp, &mut rng);
            let traj = solve(&u0, params, &cfg)?;
            Ok(bourgain_diagnostics(&traj, setup.s, (0.0, setup.t_end))?.embedding_ratio)
        })
        .collect();
    let mut report = BoundCheckReport::new("embedding", seed, EMBEDDING_CONSTANT)
        .with_grid(&grid)
        .with_budget("runs", runs as f64)
        .with_budget("t_end", setup.t_end);
    for (r, ratio) in ratios.into_iter().enumerate() {
        report.record(ratio?, || WorstCase::Parameter(r as f64));
    }
    report.detail("s", setup.s);
    Ok(report)
}
