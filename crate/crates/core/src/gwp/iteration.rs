use std::io::Write;

use serde::{Deserialize, Serialize};

use super::plan::GwpPlan;
use crate::error::{Error, Result};
use crate::evolve::{rescale_field, solve, Propagator, SolverConfig, Stepper};
use crate::imethod::{energies_at, modified_energies, Corrections, IMultiplier, TabulatedSymbol};
use crate::spectral::{sobolev_norm, RealField, SymbolParams};

/// Regularity of the growth bound.
pub const GROWTH_EXPONENT: f64 = -0.75;

/// Outcome of the unit-step iteration for the rescaled problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GwpReport {
    pub plan: GwpPlan,
    pub dt: f64,
    /// `||I u_lambda(0)||_{L^2}`.
    pub initial_i_norm: f64,
    /// `4 eps0^2`.
    pub ceiling: f64,
    /// Rescaled times `0, 1, ..., M`.
    pub times: Vec<f64>,
    pub e2: Vec<f64>,
    pub e4: Vec<f64>,
    /// `E_I^4(k) - E_I^4(k - 1)` for `k = 1..=M`.
    pub e4_increments: Vec<f64>,
    /// `||u(t)||_{H^{-3/4}} / ((1 + t) ||u_0||_{H^{-3/4}})` in original variables, `t = lambda^3 k`.
    pub growth: Vec<f64>,
    pub max_e2: f64,
    pub max_increment: f64,
    pub increment_scale: f64,
}

impl GwpReport {
    /// RFC 4180 CSV, one row per unit time.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let fmt = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(["step", "t", "e2", "e4", "e4_increment", "growth"]).map_err(fmt)?;
        for k in 0..self.times.len() {
            let inc = if k == 0 { 0.0 } else { self.e4_increments[k - 1] };
            w.write_record(&[
                k.to_string(),
                format!("{:e}", self.times[k]),
                format!("{:e}", self.e2[k]),
                format!("{:e}", self.e4[k]),
                format!("{inc:e}"),
                format!("{:e}", self.growth[k]),
            ])
            .map_err(fmt)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn growth_ratio(u: &RealField, u0_norm: f64, t: f64) -> f64 {
    if u0_norm == 0.0 {
        0.0
    } else {
        sobolev_norm(u, GROWTH_EXPONENT) / ((1.0 + t) * u0_norm)
    }
}

fn corrections(im: IMultiplier, params: &SymbolParams, u: &RealField) -> Result<Corrections<TabulatedSymbol>> {
    let grid = u.grid();
    Ok(Corrections::new(im, params)?.with_pair_cutoff(grid.cutoff_wavenumber()).tabulated(grid, 4 * grid.modes()))
}

/// Solves the rescaled problem over `plan.steps` unit times with step `dt`.
///
/// The data are mapped to `lambda^2 u_0(lambda x)` on the period `L / lambda`, the
/// symbol to `(lambda alpha, beta, lambda^2 gamma)`. `E_I^2` and `E_I^4` are
/// evaluated at each unit time; `E_I^2 >= 4 eps0^2` stops the run.
pub fn run_gwp_iteration(plan: &GwpPlan, u0: &RealField, params: &SymbolParams, dt: f64) -> Result<GwpReport> {
    if !(dt > 0.0 && dt <= 1.0) {
        return Err(Error::invalid("dt must lie in (0, 1]"));
    }
    let per_unit = (1.0 / dt).round() as usize;
    if ((per_unit as f64) * dt - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("dt must divide the unit time"));
    }
    let lambda = plan.lambda;
    let v0 = rescale_field(u0, lambda)?;
    let rparams = params.rescaled(lambda);
    let im = IMultiplier::new(plan.n, plan.s)?;
    let initial_i_norm = crate::spectral::l2_norm(&im.apply(&v0));
    if initial_i_norm > 2.0 * plan.eps0 {
        return Err(Error::ScalingFailed { norm: initial_i_norm, bound: 2.0 * plan.eps0 });
    }
    let corr = corrections(im, &rparams, &v0)?;
    let stepper = Stepper::new(v0.grid(), &rparams, dt, true, true);
    let ceiling = 4.0 * plan.eps0 * plan.eps0;
    let u0_norm = sobolev_norm(u0, GROWTH_EXPONENT);
    let unscale = |v: &RealField| v.scaled(1.0 / (lambda * lambda)).with_grid(u0.grid().clone());

    let mut v = v0.clone();
    v.truncate(v.grid().dealias_cutoff());
    let first = energies_at(&corr, &v);
    let mut times = vec![0.0];
    let mut e2 = vec![first.e2];
    let mut e4 = vec![first.e4];
    let mut growth = vec![growth_ratio(&unscale(&v)?, u0_norm, 0.0)];
    let mut prop = Propagator::new(&stepper, v.coeffs());
    for step in 1..=plan.steps {
        for _ in 0..per_unit {
            prop.step();
        }
        if !prop.is_finite() {
            return Err(Error::NonFinite { time: step as f64, last_finite: None });
        }
        let v = RealField::from_parts_unchecked(v0.grid().clone(), prop.state());
        let e = energies_at(&corr, &v);
        if !(e.e2.is_finite() && e.e4.is_finite()) {
            return Err(Error::NonFinite { time: step as f64, last_finite: None });
        }
        if e.e2 >= ceiling {
            return Err(Error::BootstrapViolated { step, e2: e.e2, ceiling });
        }
        times.push(step as f64);
        e2.push(e.e2);
        e4.push(e.e4);
        growth.push(growth_ratio(&unscale(&v)?, u0_norm, lambda.powi(3) * step as f64));
    }
    let e4_increments: Vec<f64> = e4.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(GwpReport {
        plan: plan.clone(),
        dt,
        initial_i_norm,
        ceiling,
        times,
        max_e2: e2.iter().copied().fold(0.0, f64::max),
        max_increment: e4_increments.iter().fold(0.0, |a: f64, v| a.max(v.abs())),
        increment_scale: plan.increment_scale(),
        e2,
        e4,
        e4_increments,
        growth,
    })
}

/// Change of `E_I^2` and `E_I^4` over one run for a given `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementRow {
    pub n: f64,
    /// `max_t |E_I^4(t) - E_I^4(0)|` over the recorded times.
    pub e4_increment: f64,
    pub e2_increment: f64,
}

/// Solves once without rescaling and measures the energy increments for every `N` in `ns`.
pub fn e4_increments(
    u0: &RealField,
    params: &SymbolParams,
    s: f64,
    ns: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<IncrementRow>> {
    let traj = solve(u0, params, cfg)?;
    ns.iter()
        .map(|&n| {
            let rep = modified_energies(&IMultiplier::new(n, s)?, params, &traj)?;
            let spread = |v: &[f64]| v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max);
            Ok(IncrementRow { n, e4_increment: spread(&rep.e4), e2_increment: spread(&rep.e2) })
        })
        .collect()
}

/// `||u(t)||_{H^{-3/4}} / ((1 + t) ||u_0||_{H^{-3/4}})` along a direct solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub t_end: f64,
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    /// `sup_t ||u(t)||_{H^{-3/4}} / ||u_0||_{H^{-3/4}}`.
    pub norm_growth: f64,
}

/// Direct (unscaled) solve; zero data give ratio 0.
pub fn growth_experiment(u0: &RealField, params: &SymbolParams, cfg: &SolverConfig) -> Result<GrowthReport> {
    let traj = solve(u0, params, cfg)?;
    let n0 = sobolev_norm(u0, GROWTH_EXPONENT);
    let ratios: Vec<f64> = traj.times().iter().zip(traj.states()).map(|(&t, u)| growth_ratio(u, n0, t)).collect();
    let norm_growth = if n0 == 0.0 {
        0.0
    } else {
        traj.states().iter().map(|u| sobolev_norm(u, GROWTH_EXPONENT) / n0).fold(0.0, f64::max)
    };
    Ok(GrowthReport {
        t_end: cfg.t_end,
        norm_growth,
        times: traj.times().to_vec(),
        sup_ratio: ratios.iter().copied().fold(0.0, f64::max),
        ratios,
    })
}
