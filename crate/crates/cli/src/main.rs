//! `weylcurv`: curvature reports for left-invariant Weyl structures.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 inconclusive
//! certificate.

mod commands;
mod error;
mod output;
mod spec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use weylcurv::Tolerances;

use commands::{ChartArg, Outcome, SweepKind, ThermostatArgs};
use error::{CliError, CliResult};

const SCHEMA: u32 = 1;
const SEED_VAR: &str = "WEYLCURV_SEED";

#[derive(Debug, Parser)]
#[command(name = "weylcurv", version, about = "Curvature of left-invariant Weyl structures")]
struct Cli {
    /// Seed of the witness search; defaults to $WEYLCURV_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Checks antisymmetry, Jacobi and the metric.
    Validate {
        spec: PathBuf,
        /// Writes the canonical form of the spec to this path.
        #[arg(long)]
        emit_normalized: Option<PathBuf>,
    },
    /// Killing, parallel and stretched non-positivity conditions of a field.
    Classify {
        spec: PathBuf,
        /// Field in user coordinates, overriding the spec.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        field: Option<Vec<f64>>,
    },
    /// Certifies non-positivity of the Weyl connection of `gamma * field`.
    WeylReport {
        spec: PathBuf,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        field: Option<Vec<f64>>,
    },
    /// Certifies `gamma * field / |field|` over a grid of gamma.
    SnpScan {
        spec: PathBuf,
        #[arg(long)]
        gamma_min: f64,
        #[arg(long)]
        gamma_max: f64,
        #[arg(long)]
        gamma_steps: usize,
        #[arg(long, value_enum, default_value = "log")]
        spacing: Spacing,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        field: Option<Vec<f64>>,
    },
    /// Sweeps a family over a parameter grid.
    FamilySweep {
        #[arg(long, value_enum)]
        kind: SweepKind,
        /// `a,b,c` or `start:stop:count`. Milnor: values of each lambda;
        /// solvable: values of alpha; hyperbolic: ranks.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Spectrum for `--kind solvable`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        mu: Option<Vec<f64>>,
    },
    /// Integrates the thermostat in the orthonormal frame.
    Thermostat {
        spec: PathBuf,
        /// Initial velocity in user coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        v0: Vec<f64>,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        field: Option<Vec<f64>>,
        /// Chart in which to reconstruct the base path.
        #[arg(long, value_enum)]
        reconstruct: Option<ChartArg>,
        /// CSV destination: t, frame velocity, energy, chart coordinates.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Writes every k-th step (and the last one) to the CSV.
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Validate { .. } => "validate",
            Self::Classify { .. } => "classify",
            Self::WeylReport { .. } => "weyl-report",
            Self::SnpScan { .. } => "snp-scan",
            Self::FamilySweep { .. } => "family-sweep",
            Self::Thermostat { .. } => "thermostat",
        }
    }

    fn spec_path(&self) -> Option<&Path> {
        match self {
            Self::Validate { spec, .. }
            | Self::Classify { spec, .. }
            | Self::WeylReport { spec, .. }
            | Self::SnpScan { spec, .. }
            | Self::Thermostat { spec, .. } => Some(spec),
            Self::FamilySweep { .. } => None,
        }
    }
}

#[derive(Serialize)]
struct CommandEcho {
    name: &'static str,
    args: Vec<String>,
}

#[derive(Serialize)]
struct InputInfo {
    path: String,
    sha256: String,
}

/// Field order is fixed; `wall_time_seconds` is last so that it sits on the
/// final line of the pretty output.
#[derive(Serialize)]
struct Report {
    schema: u32,
    command: CommandEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<InputInfo>,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerances: Option<Tolerances>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<Value>,
    wall_time_seconds: f64,
}

fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::invalid(format!("{SEED_VAR} must be an unsigned integer, got \"{v}\""))),
        Err(_) => Ok(0),
    }
}

fn run(command: &Command, seed: u64, input: &mut Option<InputInfo>) -> CliResult<Outcome> {
    let loaded = match command.spec_path() {
        Some(path) => {
            let loaded = spec::load(path)?;
            *input = Some(InputInfo {
                path: path.display().to_string(),
                sha256: hex::encode(Sha256::digest(&loaded.bytes)),
            });
            Some(loaded)
        }
        None => None,
    };
    let model = |field: &Option<Vec<f64>>| -> CliResult<spec::Model> {
        let mut m = loaded.as_ref().expect("command reads a spec").doc.build()?;
        if let Some(f) = field {
            if f.len() != m.dim() {
                return Err(CliError::invalid(format!("--field must have {} components, got {}", m.dim(), f.len())));
            }
            m.set_user_field(f)?;
        }
        Ok(m)
    };
    match command {
        Command::Validate { emit_normalized, .. } => {
            commands::validate(loaded.as_ref().expect("validate reads a spec"), emit_normalized.as_deref())
        }
        Command::Classify { field, .. } => commands::classify(&model(field)?),
        Command::WeylReport { gamma, field, .. } => {
            let mut m = model(field)?;
            if let Some(g) = gamma {
                m.gamma = *g;
            }
            commands::weyl_report(&m, seed)
        }
        Command::SnpScan { gamma_min, gamma_max, gamma_steps, spacing, field, .. } => {
            let grid = commands::gamma_grid(*gamma_min, *gamma_max, *gamma_steps, *spacing == Spacing::Log)?;
            commands::snp_scan(&model(field)?, &grid, seed)
        }
        Command::FamilySweep { kind, grid, mu } => {
            commands::family_sweep(*kind, &commands::parse_grid(grid)?, mu.as_deref(), seed)
        }
        Command::Thermostat { v0, dt, steps, gamma, field, reconstruct, out, every, .. } => {
            let mut m = model(field)?;
            if let Some(g) = gamma {
                m.gamma = *g;
            }
            let args = ThermostatArgs { v0, dt: *dt, steps: *steps, reconstruct: *reconstruct, out: out.as_deref(), every: *every };
            commands::thermostat(&m, &args)
        }
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = Cli::parse();
    let echo = CommandEcho { name: cli.command.name(), args: std::env::args().skip(1).collect() };
    let mut input = None;
    let (seed, outcome) = match resolve_seed(cli.seed) {
        Ok(seed) => (seed, run(&cli.command, seed, &mut input)),
        Err(e) => (0, Err(e)),
    };
    let (report, code) = match outcome {
        Ok(o) => {
            let code = if o.inconclusive { 3 } else { 0 };
            let report = Report {
                schema: SCHEMA,
                command: echo,
                input,
                seed,
                tolerances: Some(o.tolerances),
                result: Some(o.result),
                error: None,
                wall_time_seconds: start.elapsed().as_secs_f64(),
            };
            (report, code)
        }
        Err(e) => {
            eprintln!("weylcurv: {e}");
            let report = Report {
                schema: SCHEMA,
                command: echo,
                input,
                seed,
                tolerances: None,
                result: None,
                error: Some(e.to_json()),
                wall_time_seconds: start.elapsed().as_secs_f64(),
            };
            (report, e.exit_code())
        }
    };
    print!("{}", output::to_json_string(&report));
    ExitCode::from(code as u8)
}
