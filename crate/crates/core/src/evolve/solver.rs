use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{dispersion_symbol, RealField, SpectralGrid, SymbolParams, Transform};

use super::trajectory::{Scheme, Trajectory};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    /// Truncate quadratic products to the grid's dealias cutoff.
    #[serde(default = "yes")]
    pub dealias: bool,
    /// Include the `(u^2)_x` term; switching it off gives the free flow.
    #[serde(default = "yes")]
    pub nonlinear: bool,
}

fn yes() -> bool {
    true
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64, record_stride: usize) -> Result<Self> {
        let cfg = SolverConfig { dt, t_end, record_stride, dealias: true, nonlinear: true };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("record_stride must be at least 1"));
        }
        Ok(())
    }

    /// Number of steps; the step is shortened slightly so that they land exactly on `t_end`.
    pub fn steps(&self) -> usize {
        ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        self.t_end / self.steps() as f64
    }
}

/// Step size with nonlinear CFL number `K dt max|u| = cfl`, capped at `dt_max`.
pub fn cfl_dt(u: &RealField, cfl: f64, dt_max: f64) -> f64 {
    let umax = u.max_abs();
    if umax == 0.0 {
        return dt_max;
    }
    (cfl / (u.grid().modes() as f64 * umax)).min(dt_max)
}

/// `-(u^2)_x`, with the square truncated to `|m| <= limit`.
pub fn rhs_nonlinear(u: &RealField) -> RealField {
    let tr = Transform::new(u.grid());
    let c = nonlinear_coeffs(&tr, u.coeffs(), u.grid().dealias_cutoff());
    RealField::from_parts_unchecked(u.grid().clone(), c)
}

pub(crate) fn nonlinear_coeffs(tr: &Transform, u: &[Complex64], limit: usize) -> Vec<Complex64> {
    let grid = tr.grid();
    let mut sq = tr.square(u, limit);
    let k = grid.modes() as i64;
    for m in -k..=k {
        let j = grid.slot(m);
        sq[j] *= Complex64::new(0.0, -grid.wavenumber(m));
    }
    sq
}

/// Integrating-factor RK4 (Lawson) for `v = W(-t) u`.
///
/// Long runs go through [`Propagator`], which keeps `v` as the state and evaluates
/// the free phases at absolute times; `advance` performs one such step from `t = 0`.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: SpectralGrid,
    dt: f64,
    /// `p(xi)` for the modes `m = 0..=K`.
    omega: Vec<f64>,
    transform: Transform,
    limit: usize,
    nonlinear: bool,
}

impl Stepper {
    /// `dt` may be negative (backward stepping).
    pub fn new(grid: &SpectralGrid, params: &SymbolParams, dt: f64, dealias: bool, nonlinear: bool) -> Self {
        let omega = (0..=grid.modes() as i64).map(|m| dispersion_symbol(params, grid.wavenumber(m))).collect();
        Stepper {
            grid: grid.clone(),
            dt,
            omega,
            transform: Transform::new(grid),
            limit: if dealias { grid.dealias_cutoff() } else { grid.modes() },
            nonlinear,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `e^{i p(xi) t}` in storage order.
    fn phases(&self, t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (m, w) in self.omega.iter().enumerate() {
            let z = Complex64::from_polar(1.0, w * t);
            out[self.grid.slot(m as i64)] = z;
            out[self.grid.slot(-(m as i64))] = z.conj();
        }
        out
    }

    /// `e^{-ipt} N(e^{ipt} v)` with `N` the truncated `-(u^2)_x`.
    fn rhs(&self, v: &[Complex64], phase: &[Complex64]) -> Vec<Complex64> {
        let u: Vec<Complex64> = v.iter().zip(phase).map(|(a, e)| a * e).collect();
        let mut n = nonlinear_coeffs(&self.transform, &u, self.limit);
        for (a, e) in n.iter_mut().zip(phase) {
            *a *= e.conj();
        }
        n
    }

    /// One step of `v` from `t` to `t + dt`; `now` holds `e^{ipt}`, `mid` and `end` the
    /// phases at `t + dt/2` and `t + dt`.
    fn step_interaction(&self, v: &mut [Complex64], now: &[Complex64], mid: &[Complex64], end: &[Complex64]) {
        let h = self.dt;
        let shifted = |k: &[Complex64], a: f64| -> Vec<Complex64> { v.iter().zip(k).map(|(x, y)| x + a * y).collect() };
        let k1 = self.rhs(v, now);
        let k2 = self.rhs(&shifted(&k1, 0.5 * h), mid);
        let k3 = self.rhs(&shifted(&k2, 0.5 * h), mid);
        let k4 = self.rhs(&shifted(&k3, h), end);
        for j in 0..v.len() {
            v[j] += h / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
        }
        v[self.grid.slot(0)].im = 0.0;
    }

    /// Advances the coefficient vector in place by one step.
    pub fn advance(&self, u: &mut [Complex64]) {
        let mut p = Propagator::new(self, u);
        p.step();
        u.copy_from_slice(&p.state());
    }

    pub fn step(&self, u: &RealField) -> Result<RealField> {
        if !u.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let mut c = u.coeffs().to_vec();
        self.advance(&mut c);
        let out = RealField::from_parts_unchecked(self.grid.clone(), c);
        if !out.is_finite() {
            return Err(Error::NonFinite { time: self.dt, last_finite: Some(Box::new(u.clone())) });
        }
        Ok(out)
    }
}

/// Time stepping in the interaction picture.
///
/// The state is `v = W(-t) u` and the phases `e^{ipt}` are recomputed from the
/// absolute time `n dt` at every step, so the free flow adds no accumulated
/// rounding to the norm of the solution.
#[derive(Clone, Debug)]
pub struct Propagator<'a> {
    stepper: &'a Stepper,
    v: Vec<Complex64>,
    steps: usize,
    now: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    /// Starts at `t = 0` from the coefficients `u0`.
    pub fn new(stepper: &'a Stepper, u0: &[Complex64]) -> Self {
        Propagator { stepper, v: u0.to_vec(), steps: 0, now: stepper.phases(0.0) }
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.stepper.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&mut self) {
        if self.stepper.nonlinear {
            let t = self.time();
            let dt = self.stepper.dt;
            let mid = self.stepper.phases(t + 0.5 * dt);
            let end = self.stepper.phases(t + dt);
            self.stepper.step_interaction(&mut self.v, &self.now, &mid, &end);
            self.now = end;
        }
        self.steps += 1;
    }

    pub fn is_finite(&self) -> bool {
        self.v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Coefficients of `u` at the current time.
    pub fn state(&self) -> Vec<Complex64> {
        if !self.stepper.nonlinear {
            let now = self.stepper.phases(self.time());
            return self.v.iter().zip(&now).map(|(a, e)| a * e).collect();
        }
        self.v.iter().zip(&self.now).map(|(a, e)| a * e).collect()
    }
}

/// One integrating-factor RK4 step of size `dt` (negative allowed) with dealiasing.
pub fn step_ifrk4(u: &RealField, dt: f64, params: &SymbolParams) -> Result<RealField> {
    Stepper::new(u.grid(), params, dt, true, true).step(u)
}

/// Integrates from `t = 0` to `cfg.t_end`, recording every `record_stride` steps.
/// With dealiasing on, the data are first projected onto `|m| <= dealias_cutoff`.
pub fn solve(u0: &RealField, params: &SymbolParams, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let grid = u0.grid().clone();
    let steps = cfg.steps();
    let dt = cfg.effective_dt();
    let stepper = Stepper::new(&grid, params, dt, cfg.dealias, cfg.nonlinear);
    let mut start = u0.clone();
    if cfg.dealias && cfg.nonlinear {
        start.truncate(grid.dealias_cutoff());
    }
    let mut traj = Trajectory::new(grid.clone(), *params, cfg.clone(), dt, Scheme::Ifrk4);
    traj.push(0.0, start.clone());
    let c = start.into_coeffs();
    let mut prop = Propagator::new(&stepper, &c);
    let mut last = c;
    for n in 1..=steps {
        prop.step();
        if !prop.is_finite() {
            return Err(Error::NonFinite {
                time: n as f64 * dt,
                last_finite: Some(Box::new(RealField::from_parts_unchecked(grid.clone(), last))),
            });
        }
        if n % cfg.record_stride == 0 || n == steps {
            last = prop.state();
            traj.push(n as f64 * dt, RealField::from_parts_unchecked(grid.clone(), last.clone()));
        }
    }
    Ok(traj)
}

/// Advances `u` by `steps` steps of size `dt` without recording.
pub fn evolve_to(u: &RealField, params: &SymbolParams, dt: f64, steps: usize) -> Result<RealField> {
    let stepper = Stepper::new(u.grid(), params, dt, true, true);
    let mut prop = Propagator::new(&stepper, u.coeffs());
    for n in 1..=steps {
        prop.step();
        if !prop.is_finite() {
            return Err(Error::NonFinite { time: n as f64 * dt, last_finite: None });
        }
    }
    Ok(RealField::from_parts_unchecked(u.grid().clone(), prop.state()))
}
