//! Command-line front end: parses body specs and run settings, runs one
//! pipeline or harness, and writes a JSON or CSV report.
//!
//! Exit codes: 0 pass, 1 a checked property failed, 2 usage or input error,
//! 3 solver failure.

mod commands;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::verify::{Record, VerificationReport};

pub use output::{records_to_csv, to_json_bytes, write_atomic};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Parser, Serialize)]
#[command(name = "rieszcap", version, about = "Riesz capacities and capacitary potentials of convex bodies")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct CommonArgs {
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for every randomized sampling step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Record wall-clock time in the report (reports are otherwise byte-identical across runs).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    ActiveSet,
    FrankWolfe,
}

/// A point given as comma-separated coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let coords = s
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|e| format!("bad coordinate `{c}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err("coordinates must be finite".into());
        }
        Ok(Point(coords))
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// Equilibrium measure and capacity of one body.
    Capacity(CapacityArgs),
    /// Normalized Riesz potential at points and its decay at large radii.
    Potential(PotentialArgs),
    /// Half-space extension of the capacitary function (alpha = 1).
    Extension(ExtensionArgs),
    /// Quasi-concavity of the capacitary function on random segments.
    Levelset(LevelsetArgs),
    /// Brunn–Minkowski deficits along a Minkowski interpolation.
    Bm(BmArgs),
    /// Envelope construction for the interpolated capacitary function.
    Envelope(EnvelopeArgs),
    /// Capacity of parallel bodies K + B(eps) as eps decreases.
    Continuity(ContinuityArgs),
    /// Ranks a family of bodies by energy at a fixed mean width or perimeter.
    Isoperimetric(IsoperimetricArgs),
    /// Half-Laplacian through the harmonic extension.
    Fraclap(FraclapArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Capacity(_) => "capacity",
            Command::Potential(_) => "potential",
            Command::Extension(_) => "extension",
            Command::Levelset(_) => "levelset",
            Command::Bm(_) => "bm",
            Command::Envelope(_) => "envelope",
            Command::Continuity(_) => "continuity",
            Command::Isoperimetric(_) => "isoperimetric",
            Command::Fraclap(_) => "fraclap",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CapacityArgs {
    /// Body spec: a JSON file path or inline JSON.
    #[arg(long)]
    pub body: String,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 500)]
    pub resolution: usize,
    #[arg(long, value_enum, default_value_t = SolverChoice::ActiveSet)]
    pub solver: SolverChoice,
    /// Bound on the relative KKT residual.
    #[arg(long, default_value_t = 1e-7)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iterations: usize,
    /// Also check the support plateau deviation against this bound.
    #[arg(long)]
    pub plateau_tol: Option<f64>,
    /// CSV file receiving the points, weights and masses of the measure.
    #[arg(long)]
    pub measure_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PotentialArgs {
    #[arg(long)]
    pub body: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 500)]
    pub resolution: usize,
    /// Evaluation point, repeatable.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub points: Vec<Point>,
    /// Decay radii (alpha = 1), absolute.
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<f64>,
    /// Decay radii (alpha = 1) as multiples of the body diameter.
    #[arg(long, value_delimiter = ',')]
    pub diameters: Vec<f64>,
    /// Relative tolerance of the decay normalization.
    #[arg(long, default_value_t = 2e-2)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ExtensionArgs {
    #[arg(long)]
    pub body: String,
    #[arg(long, default_value_t = 500)]
    pub resolution: usize,
    #[arg(long = "point", required = true, allow_hyphen_values = true)]
    pub points: Vec<Point>,
    /// Heights t at which U(x, t) is reported.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub heights: Vec<f64>,
    /// Decreasing finite-difference steps for the Laplacian residual check at heights t > 0.
    #[arg(long, value_delimiter = ',')]
    pub fd_steps: Vec<f64>,
    /// Minimal observed convergence order of the Laplacian residual.
    #[arg(long, default_value_t = 1.9)]
    pub fd_order: f64,
    /// Allowed gap between U(x, 0) and the potential.
    #[arg(long, default_value_t = 1e-14)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("target").required(true).args(["body", "two_bump"])))]
pub struct LevelsetArgs {
    #[arg(long)]
    pub body: Option<String>,
    /// Negative control: exp(-|x-p|^2) + exp(-|x+p|^2) with |p| = 2.
    #[arg(long)]
    pub two_bump: bool,
    #[arg(long, default_value_t = 1000)]
    pub resolution: usize,
    #[arg(long, default_value_t = 10_000)]
    pub segments: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("exponent").required(true).args(["alpha", "alphas"])))]
pub struct BmArgs {
    #[arg(long)]
    pub k0: String,
    #[arg(long)]
    pub k1: String,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Sweep several exponents (reported as exploratory unless only 1).
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    pub lambdas: Vec<f64>,
    #[arg(long, default_value_t = 500)]
    pub resolution: usize,
    /// Relative tolerance on both deficits.
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EnvelopeArgs {
    #[arg(long)]
    pub k0: String,
    #[arg(long)]
    pub k1: String,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.5,0.7")]
    pub levels: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 2e-2)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub resolution: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ContinuityArgs {
    #[arg(long)]
    pub body: String,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
    pub epsilons: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 500)]
    pub resolution: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("constraint").required(true).args(["mean_width", "perimeter"])))]
pub struct IsoperimetricArgs {
    /// Family member as NAME=SPEC or SPEC (named after the file stem), repeatable.
    #[arg(long = "body", required = true)]
    pub bodies: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long)]
    pub mean_width: Option<f64>,
    #[arg(long)]
    pub perimeter: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "500,1000")]
    pub resolutions: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    /// exp(-|x|^2) in the plane, checked against the spectral oracle at the origin.
    Gaussian,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("target").required(true).args(["function", "body"])))]
pub struct FraclapArgs {
    #[arg(long, value_enum)]
    pub function: Option<TestFunction>,
    /// Capacitary function of this body (alpha = 1).
    #[arg(long)]
    pub body: Option<String>,
    #[arg(long, default_value_t = 500)]
    pub resolution: usize,
    /// Evaluation point, repeatable (default: the origin).
    #[arg(long = "point", allow_hyphen_values = true)]
    pub points: Vec<Point>,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
    pub steps: Vec<f64>,
    #[arg(long, default_value_t = 2e-2)]
    pub tol: f64,
}

/// The report layout written by every subcommand.
#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub command: &'a str,
    pub version: &'static str,
    pub config: serde_json::Value,
    pub exploratory: bool,
    pub records: &'a [Record],
    pub pass: bool,
    pub runtime_seconds: Option<f64>,
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Solver(_) => EXIT_SOLVER,
        _ => EXIT_USAGE,
    }
}

fn configure_threads() -> Result<Option<usize>, String> {
    let Ok(raw) = std::env::var("RCL_THREADS") else { return Ok(None) };
    let n: usize = raw.trim().parse().map_err(|_| format!("RCL_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("RCL_THREADS must be a positive integer, got 0".into());
    }
    // A pool built earlier in the same process (e.g. by tests) is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(Some(n))
}

/// Parses `argv` (program name first), runs the subcommand and writes the
/// report. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let threads = match configure_threads() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let start = Instant::now();
    let report = match commands::execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    match emit(&cli, threads, &report, start) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    let failed = report.failures().count();
    if report.pass {
        eprintln!("{}: pass ({} records)", cli.command.name(), report.records.len());
        EXIT_PASS
    } else {
        eprintln!("{}: FAIL ({failed} of {} records)", cli.command.name(), report.records.len());
        EXIT_FAILED
    }
}

fn emit(cli: &Cli, threads: Option<usize>, report: &VerificationReport, start: Instant) -> crate::Result<()> {
    let bytes = match cli.common.format {
        Format::Json => {
            let config = serde_json::json!({
                "command": &cli.command,
                "seed": cli.common.seed,
                "format": cli.common.format,
                "threads": threads,
                "parameters": &report.parameters,
            });
            to_json_bytes(&RunReport {
                command: cli.command.name(),
                version: env!("CARGO_PKG_VERSION"),
                config,
                exploratory: report.exploratory,
                records: &report.records,
                pass: report.pass,
                runtime_seconds: cli.common.timing.then(|| start.elapsed().as_secs_f64()),
            })?
        }
        Format::Csv => records_to_csv(&report.records)?,
    };
    match &cli.common.output {
        Some(path) => write_atomic(path, &bytes),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}
