//! Command-line harness for the sombrero ground-state iteration.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sombrero::iteration::Anchor;
use sombrero::numerics::grid::{DEFAULT_DENSITY, DEFAULT_OVERFLOW_BUDGET};
use sombrero::trialfn::DEFAULT_TRIAL_PARAMETER;
use sombrero::{GridSpec, ModelParams, SolveOptions};

use crate::output::Format;

/// Exit status when a solve stops before meeting its tolerance.
pub const EXIT_NOT_CONVERGED: u8 = 3;
/// Exit status when a reference row misses its published energy.
pub const EXIT_TABLE_MISMATCH: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "sombrero", version, about = "Ground states of the radial sombrero potential")]
struct Cli {
    /// Directory that receives output files.
    #[arg(long, global = true, env = "SOMBRERO_OUT_DIR", default_value = ".")]
    out: PathBuf,

    /// Format of tabular output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one configuration and write `report.json`.
    Solve(SolveArgs),
    /// Rerun the five published N = 3 configurations.
    Table1(Table1Args),
    /// Write the wave-function curves `fig1.csv`, `fig2.csv` and `fig3.csv`.
    Figures(FiguresArgs),
    /// Finite-difference ground-state energy.
    Oracle(OracleArgs),
    /// Energy and peak location over a (g, A) lattice.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AnchorArg {
    Origin,
    Infinity,
}

impl From<AnchorArg> for Anchor {
    fn from(a: AnchorArg) -> Self {
        match a {
            AnchorArg::Origin => Anchor::Origin,
            AnchorArg::Infinity => Anchor::Infinity,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct ProblemArgs {
    /// Spatial dimension N.
    #[arg(long = "n")]
    n: u32,
    /// Coupling g.
    #[arg(long, value_parser = positive)]
    g: f64,
    /// Shape constant A.
    #[arg(long = "A", value_parser = positive)]
    a_shape: f64,
}

impl ProblemArgs {
    fn params(&self) -> sombrero::error::Result<ModelParams> {
        ModelParams::new(self.n, self.g, self.a_shape)
    }
}

#[derive(Debug, Clone, Args)]
struct GridArgs {
    /// Grid points per unit radius.
    #[arg(long, default_value_t = DEFAULT_DENSITY, value_parser = positive)]
    density: f64,
    /// Cutoff radius is where g S0 first reaches this value.
    #[arg(long, default_value_t = DEFAULT_OVERFLOW_BUDGET, value_parser = positive)]
    budget: f64,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec { points_per_unit: self.density, overflow_budget: self.budget, ..GridSpec::default() }
    }
}

#[derive(Debug, Clone, Args)]
struct IterArgs {
    /// Stop when successive energy corrections differ by less than tol * max(1, |E|).
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    tol: f64,
    #[arg(long, default_value_t = 60, value_parser = at_least_one)]
    max_iter: usize,
    /// Point where the correction factor is pinned to 1.
    #[arg(long, value_enum)]
    anchor: Option<AnchorArg>,
    #[command(flatten)]
    grid: GridArgs,
}

impl IterArgs {
    fn options(&self, default_anchor: Anchor) -> SolveOptions {
        SolveOptions { tol: self.tol, max_iter: self.max_iter, anchor: self.anchor.map_or(default_anchor, Into::into) }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Trial-function parameter a.
    #[arg(long, default_value_t = DEFAULT_TRIAL_PARAMETER, value_parser = positive)]
    a_trial: f64,
    #[command(flatten)]
    iter: IterArgs,
    /// Also write the curves r, phi, psi, f.
    #[arg(long)]
    curves: bool,
}

#[derive(Debug, Args)]
struct Table1Args {
    /// Use this trial parameter for every row instead of the per-row value.
    #[arg(long, value_parser = positive)]
    a_trial: Option<f64>,
    #[command(flatten)]
    iter: IterArgs,
    /// Oracle step; the fine run uses half of it.
    #[arg(long, default_value_t = 0.005, value_parser = positive)]
    step: f64,
}

#[derive(Debug, Args)]
struct FiguresArgs {
    #[arg(long, default_value_t = DEFAULT_TRIAL_PARAMETER, value_parser = positive)]
    a_trial: f64,
    #[command(flatten)]
    iter: IterArgs,
    /// Largest radius sampled.
    #[arg(long, default_value_t = 3.0, value_parser = positive)]
    r_end: f64,
    #[arg(long, default_value_t = 0.01, value_parser = positive)]
    r_step: f64,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Coarse step; the fine run uses half of it.
    #[arg(long, default_value_t = 0.005, value_parser = positive)]
    step: f64,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long = "n", default_value_t = 3)]
    n: u32,
    #[arg(long, default_value_t = 0.5, value_parser = positive)]
    g_min: f64,
    #[arg(long, default_value_t = 3.0, value_parser = positive)]
    g_max: f64,
    /// Lattice points along g; 0 gives an empty lattice.
    #[arg(long, default_value_t = 11)]
    g_count: usize,
    #[arg(long = "A-min", default_value_t = 0.5, value_parser = positive)]
    a_min: f64,
    #[arg(long = "A-max", default_value_t = 3.0, value_parser = positive)]
    a_max: f64,
    #[arg(long = "A-count", default_value_t = 11)]
    a_count: usize,
    #[arg(long, default_value_t = DEFAULT_TRIAL_PARAMETER, value_parser = positive)]
    a_trial: f64,
    #[command(flatten)]
    iter: IterArgs,
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("expected a positive finite number, got {s}"))
    }
}

fn at_least_one(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        Ok(_) => Err("must be at least 1".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => commands::solve(&cli, args),
        Command::Table1(args) => commands::table1(&cli, args),
        Command::Figures(args) => commands::figures(&cli, args),
        Command::Oracle(args) => commands::oracle(&cli, args),
        Command::Sweep(args) => commands::sweep(&cli, args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
