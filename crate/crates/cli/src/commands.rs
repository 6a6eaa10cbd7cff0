use benjamin_core::evolve::solve;
use benjamin_core::gwp::{
    growth_experiment, illposed_probe, run_gwp_iteration, select_scaling, GwpPlan, IllposedReport,
};
use benjamin_core::imethod::modified_energies;
use benjamin_core::lab::{
    admissible_configs, block_sweep, multiplier_bound_check, write_sweep_csv, BlockLattice, BoundCheckReport,
    MultiplierBound, BLOCK_CONSTANT,
};
use benjamin_core::spectral::{l2_norm, momentum, sobolev_norm};
use benjamin_core::{Error as CoreError, VERSION};
use serde::Serialize;

use crate::config::{ExperimentConfig, Kind};
use crate::output::{line_plot, OutputDir, Series};
use crate::CliError;

/// How a successful run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// A checked bound or expected trend failed.
    Violation,
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Violation
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> benjamin_core::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(CoreError::from)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn write_csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn run(kind: Kind, cfg: &ExperimentConfig, out: &mut OutputDir, plot: bool) -> Result<Verdict, CliError> {
    match kind {
        Kind::Simulate => simulate(cfg, out, plot),
        Kind::Energies => energies(cfg, out, plot),
        Kind::VerifyMultipliers => verify_multipliers(cfg, out),
        Kind::VerifyBlocks => verify_blocks(cfg, out, plot),
        Kind::Growth => growth(cfg, out, plot),
        Kind::IllposedProbe => illposed(cfg, out, plot),
        Kind::Gwp => gwp(cfg, out, plot),
    }
}

#[derive(Serialize)]
struct SimulationSummary {
    version: &'static str,
    seed: u64,
    steps: usize,
    dt: f64,
    recorded: usize,
    l2_drift_rate: f64,
    momentum_drift: f64,
}

fn simulate(cfg: &ExperimentConfig, out: &mut OutputDir, plot: bool) -> Result<Verdict, CliError> {
    let u0 = cfg.initial_data()?;
    let solver = cfg.solver_config()?;
    let traj = solve(&u0, &cfg.params()?, &solver)?;
    let dir = out.path("trajectory");
    traj.save(&dir)?;
    out.record(dir);
    let s = cfg.imethod.s;
    let hs: Vec<f64> = traj.states().iter().map(|u| sobolev_norm(u, s)).collect();
    let rows = traj.times().iter().zip(traj.states()).zip(traj.l2_drift()).zip(&hs).map(|(((t, u), d), h)| {
        vec![
            format!("{t:e}"),
            format!("{:e}", l2_norm(u)),
            format!("{:e}", momentum(u)),
            format!("{d:e}"),
            format!("{h:e}"),
        ]
    });
    let hs_col = format!("hs_norm_{s}");
    out.write("norms.csv", &write_csv_rows(&["t", "l2", "momentum", "l2_drift", &hs_col], rows)?)?;
    let summary = SimulationSummary {
        version: VERSION,
        seed: cfg.seed,
        steps: solver.steps(),
        dt: traj.dt(),
        recorded: traj.len(),
        l2_drift_rate: traj.l2_drift_rate(),
        momentum_drift: traj.momentum_drift(),
    };
    out.write("summary.json", &json_bytes(&summary)?)?;
    if plot {
        let svg = line_plot(
            "Sobolev norm along the trajectory",
            "t",
            &hs_col,
            &[Series::new(&hs_col, traj.times(), &hs)],
            false,
        );
        out.write("norms.svg", svg.as_bytes())?;
    }
    Ok(Verdict::Pass)
}

fn energies(cfg: &ExperimentConfig, out: &mut OutputDir, plot: bool) -> Result<Verdict, CliError> {
    let u0 = cfg.initial_data()?;
    let params = cfg.params()?;
    let traj = solve(&u0, &params, &cfg.solver_config()?)?;
    let report = modified_energies(&cfg.multiplier()?, &params, &traj)?;
    out.write("energies.csv", &csv_bytes(|b| report.write_csv(b))?)?;
    out.write("energies.json", &json_bytes(&report)?)?;
    if plot {
        let series = [
            Series::new("E2", &report.times, &report.e2),
            Series::new("E3", &report.times, &report.e3),
            Series::new("E4", &report.times, &report.e4),
        ];
        out.write("energies.svg", line_plot("Modified energies", "t", "energy", &series, false).as_bytes())?;
    }
    Ok(Verdict::Pass)
}

fn verify_multipliers(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Verdict, CliError> {
    let im = cfg.multiplier()?;
    let params = cfg.params()?;
    let b = &cfg.budgets;
    let max_mode = b.max_mode as usize;
    let reports: Vec<BoundCheckReport> = [
        (MultiplierBound::Sigma3, b.sigma3_samples),
        (MultiplierBound::M4, b.m4_samples),
        (MultiplierBound::M5, b.m5_samples),
    ]
    .into_iter()
    .map(|(bound, samples)| multiplier_bound_check(bound, im, &params, max_mode, samples as usize, cfg.seed))
    .collect::<benjamin_core::Result<_>>()?;
    out.write("multipliers.json", &json_bytes(&reports)?)?;
    Ok(verdict(reports.iter().all(|r| r.passed())))
}

fn verify_blocks(cfg: &ExperimentConfig, out: &mut OutputDir, plot: bool) -> Result<Verdict, CliError> {
    let b = &cfg.budgets;
    let configs = admissible_configs(b.block_configs as usize, b.block_kmax as u32, cfg.seed);
    let (samples, report) = block_sweep(
        &configs,
        &cfg.params()?,
        b.block_trials as usize,
        &BlockLattice::default(),
        cfg.seed,
        BLOCK_CONSTANT,
    )?;
    out.write("blocks.csv", &csv_bytes(|buf| write_sweep_csv(&samples, buf))?)?;
    out.write("blocks.json", &json_bytes(&report)?)?;
    if plot {
        let idx: Vec<f64> = (0..samples.len()).map(|i| i as f64).collect();
        let ratios: Vec<f64> = samples.iter().map(|s| s.ratio).collect();
        let limit = vec![BLOCK_CONSTANT; samples.len()];
        let series = [Series::new("estimate / bound", &idx, &ratios), Series::new("stored constant", &idx, &limit)];
        out.write("blocks.svg", line_plot("Block estimates", "configuration", "ratio", &series, true).as_bytes())?;
    }
    Ok(verdict(report.passed()))
}

fn growth(cfg: &ExperimentConfig, out: &mut OutputDir, plot: bool) -> Result<Verdict, CliError> {
    let u0 = cfg.initial_data()?;
    let report = growth_experiment(&u0, &cfg.params()?, &cfg.solver_config()?)?;
    let rows = report.times.iter().zip(&report.ratios).map(|(t, r)| vec![format!("{t:e}"), format!("{r:e}")]);
    out.write("growth.csv", &write_csv_rows(&["t", "ratio"], rows)?)?;
    out.write("growth.json", &json_bytes(&report)?)?;
    if plot {
        let series = [Series::new("ratio", &report.times, &report.ratios)];
        out.write("growth.svg", line_plot("Normalized growth", "t", "ratio", &series, false).as_bytes())?;
    }
    Ok(verdict(report.sup_ratio <= cfg.growth.constant * (1.0 + 1e-12)))
}

/// Growth in `Nf` below `s = -3/4`, at most a factor 3 over the first value otherwise.
fn expected_trend(report: &IllposedReport) -> bool {
    let norms: Option<Vec<f64>> = report.norms().into_iter().collect();
    let Some(norms) = norms else {
        return false;
    };
    if report.s < -0.75 {
        norms.windows(2).all(|w| w[1] > w[0])
    } else {
        norms.iter().all(|v| *v <= 3.0 * norms[0])
    }
}

fn illposed(cfg: &ExperimentConfig, out: &mut OutputDir, plot: bool) -> Result<Verdict, CliError> {
    let p = &cfg.illposed;
    let report = illposed_probe(&cfg.params()?, p.s, &p.freqs, p.delta, &p.probe)?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    let rows = report.rows.iter().map(|r| {
        vec![
            r.nf.to_string(),
            r.modes.to_string(),
            format!("{:e}", r.dt),
            r.steps.to_string(),
            opt(r.norm),
            opt(r.norm_half_delta),
            opt(r.consistency()),
            opt(r.escaped_at),
        ]
    });
    let header = ["nf", "modes", "dt", "steps", "norm", "norm_half_delta", "consistency", "escaped_at"];
    out.write("illposed.csv", &write_csv_rows(&header, rows)?)?;
    out.write("illposed.json", &json_bytes(&report)?)?;
    if plot {
        let (nf, norms): (Vec<f64>, Vec<f64>) =
            report.rows.iter().filter_map(|r| r.norm.map(|v| (r.nf as f64, v))).unzip();
        let svg = line_plot(
            &format!("Third-derivative probe, s = {}", report.s),
            "Nf",
            "norm",
            &[Series::new("norm", &nf, &norms)],
            true,
        );
        out.write("illposed.svg", svg.as_bytes())?;
    }
    Ok(verdict(expected_trend(&report)))
}

#[derive(Serialize)]
struct BootstrapFailure<'a> {
    version: &'static str,
    plan: &'a GwpPlan,
    step: usize,
    e2: f64,
    ceiling: f64,
}

fn gwp(cfg: &ExperimentConfig, out: &mut OutputDir, plot: bool) -> Result<Verdict, CliError> {
    let g = &cfg.gwp;
    let s = cfg.imethod.s;
    let u0 = cfg.initial_data()?;
    let phi_norm = sobolev_norm(&u0, s);
    let plan = match g.n {
        Some(n) => GwpPlan::with_n(g.t_target, s, phi_norm, g.eps0, n)?,
        None => select_scaling(g.t_target, s, phi_norm, g.eps0)?,
    };
    out.write("plan.json", &json_bytes(&plan)?)?;
    if plan.steps as f64 > cfg.budgets.gwp_unit_steps {
        return Err(CliError::Budget(format!(
            "the plan needs {} unit steps (N = {}, lambda = {:.3e}); budgets.gwp_unit_steps is {}",
            plan.steps, plan.n, plan.lambda, cfg.budgets.gwp_unit_steps
        )));
    }
    let report = match run_gwp_iteration(&plan, &u0, &cfg.params()?, g.dt) {
        Ok(r) => r,
        Err(CoreError::BootstrapViolated { step, e2, ceiling }) => {
            let failure = BootstrapFailure { version: VERSION, plan: &plan, step, e2, ceiling };
            out.write("bootstrap-violation.json", &json_bytes(&failure)?)?;
            return Ok(Verdict::Violation);
        }
        Err(e) => return Err(e.into()),
    };
    out.write("gwp.csv", &csv_bytes(|b| report.write_csv(b))?)?;
    out.write("gwp.json", &json_bytes(&report)?)?;
    if plot {
        let series = [Series::new("E2", &report.times, &report.e2), Series::new("E4", &report.times, &report.e4)];
        out.write(
            "gwp.svg",
            line_plot("Rescaled energies per unit step", "step", "energy", &series, false).as_bytes(),
        )?;
    }
    Ok(Verdict::Pass)
}
