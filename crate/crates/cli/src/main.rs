mod commands;
mod output;
mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gearmap::GearError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "gearmap",
    version,
    about = "Conformal maps of the disk onto one-tooth gears and pregears"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for one map, classify its image and normalize it to a gear.
    Map(MapArgs),
    /// Tabulate the region of gearlikeness and the Nehari band.
    Region(RegionArgs),
    /// Find (t1, t2, q, t, λ, M) for a gear G_{β,γ}.
    Params(ParamsArgs),
    /// Conformal module M(t), at one point or on a grid.
    Module(ModuleArgs),
    /// The curve γ ↦ M(G_{β,γ}) at fixed β.
    Sweep(SweepArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Svg,
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Svg => "svg",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Distance from the unit circle of the innermost boundary sample.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Absolute and relative ODE tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of uniformly spaced boundary rays.
    #[arg(long)]
    pub rays: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct MapArgs {
    /// Symmetric prevertex angle, with --lambda.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// General prevertex angles; without --lambda the gear map itself is traced.
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct RegionArgs {
    /// Number of interior grid points t_i = (π/2)·i/(n+1).
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Also solve and classify probe maps in every row.
    #[arg(long)]
    pub probes: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ParamsArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub gamma: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ModuleArgs {
    #[arg(long)]
    pub t: Option<f64>,
    /// Grid size when --t is omitted.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    /// Number of interior grid points γ_i = π·i/(n+1).
    #[arg(long, default_value_t = 60)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(GearError),
    Io(std::io::Error),
}

impl From<GearError> for CliError {
    fn from(e: GearError) -> Self {
        match e {
            GearError::Domain { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Picks the requested format, checking it against the ones a command supports.
pub fn choose_format(
    requested: Option<Format>,
    allowed: &[Format],
) -> Result<Format, CliError> {
    match requested {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(CliError::Usage(format!(
            "format {} is not available here (choose from {})",
            f.name(),
            allowed.iter().map(|f| f.name()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, out) = match &cli.command {
        Command::Map(a) => ("map", a.output.out.clone()),
        Command::Region(a) => ("region", a.output.out.clone()),
        Command::Params(a) => ("params", a.output.out.clone()),
        Command::Module(a) => ("module", a.output.out.clone()),
        Command::Sweep(a) => ("sweep", a.output.out.clone()),
    };
    let result = match &cli.command {
        Command::Map(a) => commands::map(a),
        Command::Region(a) => commands::region(a),
        Command::Params(a) => commands::params(a),
        Command::Module(a) => commands::module(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    let result = result.and_then(|text| output::emit(out.as_deref(), &text).map_err(CliError::Io));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("gearmap {name}: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(e)) => {
            eprintln!("gearmap {name}: {e}");
            let doc = commands::failure_document(name, &e);
            // The diagnostic goes to stdout so that --out is left untouched.
            let _ = output::emit(None, &output::json_string(&doc));
            ExitCode::from(3)
        }
        Err(CliError::Io(e)) => {
            eprintln!("gearmap {name}: {e}");
            ExitCode::from(3)
        }
    }
}
