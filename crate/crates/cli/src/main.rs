//! `optoswap`: regenerate the cooling, transfer, kitten, tolerance and
//! heating data sets and run the oracle cross-checks.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::ConfigFile;
use crate::output::Writer;

const DEFAULT_OUT: &str = "optoswap-out";
const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "optoswap", version, about = "Pulsed optomechanical state-swap experiments")]
struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "OPTOSWAP_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Wigner grid points per axis (power of two).
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Wigner grid half-width.
    #[arg(long, global = true)]
    grid_extent: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Cooling at the configured temperatures and the single-quantum transfer infidelity.
    Table1,
    /// Final occupancy over damping ratio and bath occupancy.
    CoolSurface,
    /// Output Wigner functions after transferring optical Fock states.
    FockTransfer,
    /// Kitten-state infidelity against squeezing.
    Kitten,
    /// Width of the cooling dip in pulse strength.
    Tolerance,
    /// Absorption heating estimate.
    Heating,
    /// Compare the brute-force oracles with the closed-form pipeline.
    Verify,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Compute(String),
    VerificationFailed,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Compute(m) => write!(f, "{m}"),
            CliError::VerificationFailed => write!(f, "verification failed"),
        }
    }
}

impl From<optoswap::Error> for CliError {
    fn from(e: optoswap::Error) -> Self {
        use optoswap::Error as E;
        match e {
            E::InvalidParameter { .. } | E::Overdamped { .. } | E::InvalidGrid(_) | E::Config(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::VerificationFailed => 3,
            CliError::Io(_) | CliError::Compute(_) => 1,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let mut grid = config.grid.unwrap_or_default();
    if let Some(n) = cli.grid_points {
        grid.n_points = n;
    }
    if let Some(r) = cli.grid_extent {
        grid.r_max = r;
    }
    grid.validate()?;
    let out = cli
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let seed = cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let mut ctx = Context {
        config,
        grid,
        seed,
        writer: Writer::new(&out)?,
    };
    let result = match cli.command {
        Command::Table1 => commands::table1(&mut ctx),
        Command::CoolSurface => commands::cool_surface(&mut ctx),
        Command::FockTransfer => commands::fock_transfer_cmd(&mut ctx),
        Command::Kitten => commands::kitten(&mut ctx),
        Command::Tolerance => commands::tolerance(&mut ctx),
        Command::Heating => commands::heating(&mut ctx),
        Command::Verify => match commands::verify(&mut ctx) {
            Ok(true) => Ok(()),
            Ok(false) => Err(CliError::VerificationFailed),
            Err(e) => Err(e),
        },
    };
    for path in &ctx.writer.written {
        println!("wrote {}", path.display());
    }
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("optoswap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
