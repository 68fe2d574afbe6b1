//! Command-line front end.
//!
//! `solve` prints the boundary and its diagnostics, `curve` samples the value
//! function, `verify` runs every module's checks on one parameter set and
//! `compare` tabulates the closed form against the independent oracles.
//! Results go to standard output; failures go to standard error as a JSON
//! object. Exit codes: 0 success, 2 invalid input, 3 no boundary found,
//! 4 numerical failure, 5 a verification check failed.

mod checks;
mod compare;
pub mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::closed_form::{solve_boundary_with, SolveOptions, SteadyStateSolution};
use crate::error::Error;
use crate::model::{CirParams, ContractParams};
use crate::par::Execution;

pub use checks::{run_checks, Check, CheckStatus};
pub use compare::{compare_rows, CompareRow};

#[derive(Debug, Parser)]
#[command(
    name = "prepay",
    version,
    about = "Optimal prepayment boundary and mortgage value under CIR rates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the prepayment boundary and print it with diagnostics.
    Solve(RunArgs),
    /// Sample the value function on a grid (CSV by default).
    Curve(RunArgs),
    /// Run the full check suite on one parameter set.
    Verify(RunArgs),
    /// Tabulate the closed form against shooting, finite differences and Monte Carlo.
    Compare(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    Shooting,
    Fd,
    Mc,
}

/// Test hook: deliberately breaks a derived constant before the checks run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Corruption {
    Lambda,
}

/// Every flag is optional on the command line; values missing there are taken
/// from `--config` and then from the defaults.
#[derive(Debug, Clone, Default, clap::Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunArgs {
    /// JSON file with any of the options below (snake_case keys).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Mean-reversion speed (1/year).
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Long-run mean rate (1/year).
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Rate volatility.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Mortgage rate (1/year).
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Payment rate ($/year); values are reported scaled by m/c. Defaults to c.
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    /// Relative tolerance on the boundary
    #[arg(long, allow_negative_numbers = true)]
    pub tol_root: Option<f64>,
    /// Quadrature tolerance
    #[arg(long, allow_negative_numbers = true)]
    pub tol_quad: Option<f64>,
    /// Curve start (default x*).
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    /// Curve end (default 10·max(θ, c)).
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    /// Curve points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Finite-difference grid nodes on [0, 50·θ] (default 2000)
    #[arg(long)]
    pub fd_nodes: Option<usize>,
    /// Monte Carlo paths (default 100000)
    #[arg(long)]
    pub mc_paths: Option<usize>,
    /// Monte Carlo time step in years.
    #[arg(long, allow_negative_numbers = true)]
    pub mc_dt: Option<f64>,
    /// Monte Carlo seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output format (solve, verify and compare default to json)
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// Oracles to leave out (repeatable or comma-separated).
    #[arg(long, value_enum, value_delimiter = ',')]
    #[serde(default)]
    pub skip: Vec<Oracle>,
    #[arg(long, value_enum, hide = true)]
    #[serde(skip)]
    pub corrupt: Option<Corruption>,
}

pub const DEFAULT_POINTS: usize = 100;
pub const DEFAULT_FD_NODES: usize = 2000;
pub const DEFAULT_MC_PATHS: usize = 100_000;
pub const DEFAULT_MC_DT: f64 = 1.0 / 252.0;
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cir: CirParams,
    pub contract: ContractParams,
    pub solve: SolveOptions,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub points: usize,
    pub fd_nodes: usize,
    pub mc_paths: usize,
    pub mc_dt: f64,
    pub seed: u64,
    pub output: Option<OutputFormat>,
    pub skip: Vec<Oracle>,
    pub corrupt: Option<Corruption>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("missing required parameter `{0}`")]
    Missing(&'static str),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Missing(_) => 2,
            CliError::Core(Error::Validation { .. }) => 2,
            CliError::Core(Error::NoBracket { .. }) => 3,
            CliError::Core(_) => 4,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, field, extra) = match self {
            CliError::Config(_) => ("config", None, Value::Null),
            CliError::Missing(f) => ("validation", Some(*f), Value::Null),
            CliError::Core(e) => match e {
                Error::Validation { field, .. } => ("validation", Some(*field), Value::Null),
                Error::NoBracket { samples, .. } => ("no_bracket", None, json!({ "samples": samples })),
                Error::Convergence { trace, .. } => ("convergence", None, json!({ "trace": trace })),
                _ => ("numerical", None, Value::Null),
            },
        };
        let mut obj = json!({ "kind": kind, "message": self.to_string() });
        if let Some(f) = field {
            obj["field"] = json!(f);
        }
        if let Value::Object(map) = extra {
            for (k, v) in map {
                obj[k] = v;
            }
        }
        json!({ "error": obj })
    }
}

fn merge(cli: &RunArgs) -> Result<RunArgs, CliError> {
    let Some(path) = &cli.config else {
        return Ok(cli.clone());
    };
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let file: RunArgs =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(RunArgs {
        config: cli.config.clone(),
        k: cli.k.or(file.k),
        theta: cli.theta.or(file.theta),
        sigma: cli.sigma.or(file.sigma),
        c: cli.c.or(file.c),
        m: cli.m.or(file.m),
        tol_root: cli.tol_root.or(file.tol_root),
        tol_quad: cli.tol_quad.or(file.tol_quad),
        x_min: cli.x_min.or(file.x_min),
        x_max: cli.x_max.or(file.x_max),
        points: cli.points.or(file.points),
        fd_nodes: cli.fd_nodes.or(file.fd_nodes),
        mc_paths: cli.mc_paths.or(file.mc_paths),
        mc_dt: cli.mc_dt.or(file.mc_dt),
        seed: cli.seed.or(file.seed),
        output: cli.output.or(file.output),
        skip: if cli.skip.is_empty() {
            file.skip
        } else {
            cli.skip.clone()
        },
        corrupt: cli.corrupt,
    })
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self, CliError> {
        let a = merge(args)?;
        let k = a.k.ok_or(CliError::Missing("k"))?;
        let theta = a.theta.ok_or(CliError::Missing("theta"))?;
        let sigma = a.sigma.ok_or(CliError::Missing("sigma"))?;
        let c = a.c.ok_or(CliError::Missing("c"))?;
        let cir = CirParams::new(k, theta, sigma)?;
        let contract = ContractParams::new(c, a.m.unwrap_or(c), None)?;
        let defaults = SolveOptions::default();
        let solve = SolveOptions {
            tol_root: a.tol_root.unwrap_or(defaults.tol_root),
            tol_quad: a.tol_quad.unwrap_or(defaults.tol_quad),
            ..defaults
        };
        let points = a.points.unwrap_or(DEFAULT_POINTS);
        if points < 2 {
            return Err(Error::validation("points", "need at least 2").into());
        }
        for (field, v) in [("x_min", a.x_min), ("x_max", a.x_max)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::validation(field, format!("must be finite and ≥ 0, got {v}")).into());
                }
            }
        }
        let fd_nodes = a.fd_nodes.unwrap_or(DEFAULT_FD_NODES);
        if fd_nodes < 3 {
            return Err(Error::validation("fd_nodes", "need at least 3").into());
        }
        let mc_paths = a.mc_paths.unwrap_or(DEFAULT_MC_PATHS);
        if mc_paths == 0 {
            return Err(Error::validation("mc_paths", "need at least one path").into());
        }
        let mc_dt = a.mc_dt.unwrap_or(DEFAULT_MC_DT);
        if !(mc_dt > 0.0 && mc_dt.is_finite()) {
            return Err(Error::validation("mc_dt", format!("must be positive, got {mc_dt}")).into());
        }
        Ok(RunConfig {
            cir,
            contract,
            solve,
            x_min: a.x_min,
            x_max: a.x_max,
            points,
            fd_nodes,
            mc_paths,
            mc_dt,
            seed: a.seed.unwrap_or(DEFAULT_SEED),
            output: a.output,
            skip: a.skip,
            corrupt: a.corrupt,
        })
    }

    pub fn skips(&self, oracle: Oracle) -> bool {
        self.skip.contains(&oracle)
    }

    fn parameters_json(&self) -> Value {
        json!({
            "k": self.cir.k,
            "theta": self.cir.theta,
            "sigma": self.cir.sigma,
            "c": self.contract.c,
            "m": self.contract.m,
        })
    }

    fn solve(&self) -> Result<SteadyStateSolution, CliError> {
        Ok(solve_boundary_with(&self.cir, &self.contract, &self.solve)?)
    }
}

/// Rendered command output and whether every check it ran passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub passed: bool,
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Output, CliError> {
    let sol = cfg.solve()?;
    let report = json!({
        "command": "solve",
        "parameters": cfg.parameters_json(),
        "tolerances": { "root": cfg.solve.tol_root, "quadrature": cfg.solve.tol_quad },
        "x_star": sol.x_star,
        "z_star": sol.z_star,
        "c1": sol.c1,
        "c2": sol.c2,
        "c2_scaled": sol.c2_scaled,
        "value_scale": cfg.contract.scale(),
        "constants": sol.consts,
        "diagnostics": sol.diagnostics,
    });
    let text = match cfg.output.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => output::to_json(report),
        OutputFormat::Csv => output::csv_record(&report),
    };
    Ok(Output { text, passed: true })
}

pub fn cmd_curve(cfg: &RunConfig) -> Result<Output, CliError> {
    let sol = cfg.solve()?;
    let lo = cfg.x_min.unwrap_or(sol.x_star);
    let hi = cfg.x_max.unwrap_or(10.0 * cfg.cir.theta.max(cfg.contract.c));
    if !(hi > lo) {
        return Err(Error::validation("x_max", format!("must exceed x_min = {lo}")).into());
    }
    let n = cfg.points;
    let xs: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let curve = sol.curve(&xs, Execution::default())?;
    let scale = cfg.contract.scale();
    let rows: Vec<Value> = curve
        .points
        .iter()
        .map(|p| json!({ "x": p.x, "v": scale * p.v, "ode_residual": p.ode_residual.map(|r| scale * r) }))
        .collect();
    let text = match cfg.output.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => output::csv_table(&["x", "v", "ode_residual"], &rows),
        OutputFormat::Json => output::to_json(json!({
            "command": "curve",
            "parameters": cfg.parameters_json(),
            "x_star": sol.x_star,
            "value_scale": scale,
            "points": rows,
        })),
    };
    Ok(Output { text, passed: true })
}

const CHECK_COLUMNS: [&str; 7] = ["name", "module", "status", "value", "tolerance", "margin", "detail"];

pub fn cmd_verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let checks = run_checks(cfg)?;
    let count = |s: CheckStatus| checks.iter().filter(|c| c.status == s).count();
    let passed = count(CheckStatus::Fail) == 0;
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| serde_json::to_value(c).expect("checks serialize"))
        .collect();
    let text = match cfg.output.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => output::to_json(json!({
            "command": "verify",
            "parameters": cfg.parameters_json(),
            "seed": cfg.seed,
            "summary": {
                "passed": count(CheckStatus::Pass),
                "failed": count(CheckStatus::Fail),
                "skipped": count(CheckStatus::Skipped),
            },
            "all_passed": passed,
            "checks": rows,
        })),
        OutputFormat::Csv => output::csv_table(&CHECK_COLUMNS, &rows),
    };
    Ok(Output { text, passed })
}

const COMPARE_COLUMNS: [&str; 9] = [
    "method",
    "quantity",
    "x",
    "estimate",
    "reference",
    "difference",
    "tolerance",
    "status",
    "detail",
];

pub fn cmd_compare(cfg: &RunConfig) -> Result<Output, CliError> {
    let rows = compare_rows(cfg)?;
    let passed = rows.iter().all(|r| r.status != CheckStatus::Fail);
    let values: Vec<Value> = rows
        .iter()
        .map(|r| serde_json::to_value(r).expect("rows serialize"))
        .collect();
    let text = match cfg.output.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => output::to_json(json!({
            "command": "compare",
            "parameters": cfg.parameters_json(),
            "seed": cfg.seed,
            "value_scale": cfg.contract.scale(),
            "all_passed": passed,
            "rows": values,
        })),
        OutputFormat::Csv => output::csv_table(&COMPARE_COLUMNS, &values),
    };
    Ok(Output { text, passed })
}

type Handler = fn(&RunConfig) -> Result<Output, CliError>;

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let (args, f): (&RunArgs, Handler) = match &cli.command {
        Command::Solve(a) => (a, cmd_solve),
        Command::Curve(a) => (a, cmd_curve),
        Command::Verify(a) => (a, cmd_verify),
        Command::Compare(a) => (a, cmd_compare),
    };
    f(&RunConfig::from_args(args)?)
}

/// Parses the process arguments, runs the command and maps the outcome to an exit code.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = json!({ "error": { "kind": "usage", "message": e.to_string().trim_end() } });
            let _ = writeln!(std::io::stderr(), "{}", output::to_json(err).trim_end());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(4);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(5)
            }
        }
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "{}", output::to_json(e.to_json()).trim_end());
            ExitCode::from(e.exit_code())
        }
    }
}
