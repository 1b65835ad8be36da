//! `ptcircle` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ptcircle::{Backend, Matching};

#[derive(Debug, Parser)]
#[command(
    name = "ptcircle",
    version,
    about = "Real spectra of PT-symmetric step potentials on a circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest energy levels with difference tables.
    Spectrum(SpectrumArgs),
    /// Sign and log-magnitude of the secular function on a uniform grid.
    Scan(ScanArgs),
    /// Imaginary part of the potential on a grid, plus segment edges.
    Potential(PotentialArgs),
    /// Difference tables and quasi-degenerate pairs of a saved spectrum.
    Analyze(AnalyzeArgs),
    /// Cross-backend, structural and weak-coupling checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Model {
    /// Coupling strength of the ±iZ steps.
    #[arg(long = "Z", default_value_t = 1.0)]
    pub z: f64,
    /// Wells per quarter circle; the potential has 4M segments.
    #[arg(long = "M", default_value_t = 1)]
    pub m: usize,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Solver {
    #[arg(long, default_value = "monodromy", value_parser = parse_backend)]
    pub backend: Backend,
    /// continuous or origin-twist; defaults to origin-twist for M=1.
    #[arg(long, value_parser = parse_matching)]
    pub matching: Option<Matching>,
}

#[derive(Debug, Args)]
pub struct Range {
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Grid points per scan (at least 16).
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: Model,
    #[arg(long, default_value_t = 18)]
    pub levels: usize,
    #[command(flatten)]
    pub solver: Solver,
    #[command(flatten)]
    pub range: Range,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: Model,
    /// Sets the default range when --t-min is omitted.
    #[arg(long, default_value_t = 18)]
    pub levels: usize,
    #[command(flatten)]
    pub solver: Solver,
    #[command(flatten)]
    pub range: Range,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[command(flatten)]
    pub model: Model,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Spectrum JSON written by `ptcircle spectrum --format json`.
    #[arg(long)]
    pub input: PathBuf,
    /// Relative gap below which neighbouring levels are paired.
    #[arg(long, default_value_t = ptcircle::spectrum::DEFAULT_QUASI_TOL)]
    pub quasi_tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub solver: Solver,
    #[command(flatten)]
    pub output: Output,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: ptcircle::Error| e.to_string())
}

fn parse_matching(s: &str) -> Result<Matching, String> {
    s.parse().map_err(|e: ptcircle::Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = commands::reality_tol().and_then(|tol| match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, tol),
        Command::Scan(a) => commands::scan(a, tol),
        Command::Potential(a) => commands::potential(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Validate(a) => commands::validate(a, tol),
    });
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
