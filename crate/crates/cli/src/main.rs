//! `kdvgas`: sweeps, Whitham tables, phase constants and validation for KdV soliton gases.
//!
//! Exit status: 0 when everything passes, 1 when a validation check fails or a
//! run cannot complete, 2 for configuration errors.

mod commands;
mod config;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "kdvgas", version, about = "KdV soliton gas: exact, Riemann-Hilbert and asymptotic routes")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated subset of exact,gas,asym.
    #[arg(long, global = true)]
    routes: Option<String>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Nyström nodes for the gas route.
    #[arg(long, global = true)]
    n_nodes: Option<usize>,
    /// Soliton count for the exact route.
    #[arg(long, global = true)]
    ensemble_n: Option<usize>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the requested routes on the configured grid.
    Eval,
    /// The t = 10 three-region profile (asymptotic route unless --routes says otherwise).
    Fig1,
    /// Tabulate the Whitham modulation alpha(xi) across the fan.
    Whitham {
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Print the phase and frequency constants of the configured gas.
    Phases {
        /// Also report the modulated-wave constants at this xi = x/(4t).
        #[arg(long, allow_negative_numbers = true)]
        xi: Option<f64>,
    },
    /// Run the acceptance criteria and report {check, value, threshold, pass}.
    Validate {
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long)]
        criteria: Option<String>,
    },
}

impl Common {
    /// Loads the base configuration and applies command-line overrides.
    fn resolve(&self, base: RunConfig) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => base,
        };
        if let Some(r) = &self.routes {
            cfg.routes = config::parse_routes(r)?;
        }
        if let Some(p) = &self.out {
            cfg.output.path = Some(p.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        if let Some(n) = self.n_nodes {
            cfg.n_nodes = n;
        }
        if let Some(n) = self.ensemble_n {
            cfg.ensemble_n = n;
        }
        if self.jobs.is_some() {
            cfg.jobs = self.jobs;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let common = &cli.common;
    match cli.command {
        Command::Eval => commands::eval("eval", common.resolve(RunConfig::default())?),
        Command::Fig1 => commands::eval("fig1", common.resolve(RunConfig::fig1())?),
        Command::Whitham { samples } => commands::whitham(common.resolve(RunConfig::default())?, samples),
        Command::Phases { xi } => commands::phases(common.resolve(RunConfig::default())?, xi),
        Command::Validate { criteria } => commands::validate(common, criteria.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("kdvgas: {e:#}");
            if e.chain().any(|c| c.is::<ConfigError>()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
