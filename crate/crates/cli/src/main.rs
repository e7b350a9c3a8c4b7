use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(
    name = "awlift",
    version,
    about = "Lifts of harmonic maps to minimal surfaces and their quasiconformal extensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the injectivity and extension conditions on a grid.
    Check(CommonArgs),
    /// Export the lifted surface as a mesh.
    Mesh(CommonArgs),
    /// Export the surface together with its reflection.
    Extend(CommonArgs),
    /// Sample the dilatation of the extension and compare with the bound.
    Qc(CommonArgs),
    /// Second differences of u along random geodesics.
    Convexity(CommonArgs),
    /// Compare the extension with the classical formula for analytic maps.
    CompareClassical(CommonArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Obj,
    Ply,
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Map specification: a JSON file, or inline JSON starting with `{`.
    #[arg(long)]
    pub map: String,
    #[arg(long, default_value_t = 64)]
    pub n_radial: usize,
    #[arg(long, default_value_t = 128)]
    pub n_angular: usize,
    #[arg(long, default_value_t = 0.995)]
    pub r_max: f64,
    #[arg(long, default_value_t = 1.5)]
    pub exterior_r_max: f64,
    /// Sample count (qc: exterior points, convexity: geodesics,
    /// compare-classical: exterior points).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Mesh path for mesh/extend, JSON summary path otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Obj)]
    pub format: Format,
    /// Per-sample CSV.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("AWLIFT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| format!("AWLIFT_THREADS must be a positive integer, got `{value}`"))?;
    if n == 0 {
        return Err("AWLIFT_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let result = match &cli.command {
        Command::Check(a) => commands::check(a),
        Command::Mesh(a) => commands::mesh(a, false),
        Command::Extend(a) => commands::mesh(a, true),
        Command::Qc(a) => commands::qc(a),
        Command::Convexity(a) => commands::convexity(a),
        Command::CompareClassical(a) => commands::compare_classical(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
