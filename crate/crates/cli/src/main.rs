//! `benjamin`: runs one experiment of the Benjamin equation laboratory and writes its reports.
//!
//! Exit status is 0 when every checked bound holds, 2 when a bound or expected trend
//! fails, and 1 on any error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Verdict;
use crate::config::{ConfigError, ExperimentConfig, Kind};
use crate::output::OutputDir;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(ConfigError),
    #[error(transparent)]
    Core(#[from] benjamin_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "benjamin", version, about = "Pseudospectral and I-method experiments for the Benjamin equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve from seeded data and store the trajectory and its norms.
    Simulate(Common),
    /// Modified energies E2, E3, E4 along a solve.
    Energies(Common),
    /// Monte Carlo check of the sigma3, M4 and M5 bounds.
    VerifyMultipliers(Common),
    /// Block-estimate sweep over admissible dyadic configurations.
    VerifyBlocks(Common),
    /// Normalized H^{-3/4} growth along a direct solve.
    Growth(Common),
    /// Finite-difference third derivative of the data-to-solution map.
    IllposedProbe(Common),
    /// Scaling plan and unit-step energy iteration.
    Gwp(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON experiment config; defaults apply to every missing field.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's output_dir, else ./out).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides one budget, e.g. `--budget m5_samples=2000`; repeatable.
    #[arg(long, value_name = "KEY=VALUE")]
    budget: Vec<String>,
    /// Also write SVG line plots.
    #[arg(long)]
    plot: bool,
}

impl Command {
    fn split(self) -> (Kind, Common) {
        match self {
            Command::Simulate(c) => (Kind::Simulate, c),
            Command::Energies(c) => (Kind::Energies, c),
            Command::VerifyMultipliers(c) => (Kind::VerifyMultipliers, c),
            Command::VerifyBlocks(c) => (Kind::VerifyBlocks, c),
            Command::Growth(c) => (Kind::Growth, c),
            Command::IllposedProbe(c) => (Kind::IllposedProbe, c),
            Command::Gwp(c) => (Kind::Gwp, c),
        }
    }
}

fn parse_budget(arg: &str) -> Result<(String, f64), ConfigError> {
    let fail = |msg: &str| ConfigError { field: format!("--budget {arg}"), message: msg.to_string() };
    let (key, value) = arg.split_once('=').ok_or_else(|| fail("expected KEY=VALUE"))?;
    let value: f64 = value.trim().parse().map_err(|_| fail("value is not a number"))?;
    Ok((key.trim().to_string(), value))
}

fn execute(kind: Kind, common: Common) -> Result<(Verdict, OutputDir), CliError> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    for arg in &common.budget {
        let (key, value) = parse_budget(arg)?;
        cfg.budgets.set(&key, value)?;
    }
    cfg.validate(kind)?;
    let root = common.out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let mut out = OutputDir::new(root);
    let verdict = commands::run(kind, &cfg, &mut out, common.plot)?;
    Ok((verdict, out))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (kind, common) = cli.command.split();
    match execute(kind, common) {
        Ok((verdict, out)) => {
            for path in out.written() {
                println!("wrote {}", path.display());
            }
            match verdict {
                Verdict::Pass => {
                    println!("{}: pass", kind.name());
                    ExitCode::SUCCESS
                }
                Verdict::Violation => {
                    println!("{}: bound violated", kind.name());
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
