use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bcghost_cli::suites::Suite;
use bcghost_cli::{CliError, Output, SewOptions};
use clap::{Parser, Subcommand};

/// Exact computations for the bc ghost system on marked rational curves.
#[derive(Parser)]
#[command(name = "bcghost", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; exit code 0 iff every check passes.
    Verify {
        /// Suite to run; omit to run all of them.
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Window degree, overriding the suite default.
        #[arg(long)]
        max_degree: Option<i64>,
    },
    /// Solve for the ghost vacuum of a curve.
    Vacuum {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        cutoff: i64,
    },
    /// Sew the single node of a curve into a q-series.
    Sew {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        q_order: usize,
        #[arg(long, default_value_t = 3)]
        window: i64,
        /// Window of the base vacuum on the normalization [default: 2 q_order + window + 5].
        #[arg(long)]
        base_cutoff: Option<i64>,
    },
    /// Build the preferred element from normalized expansion data.
    Preferred {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        cutoff: i64,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Verify { suite: Some(s), max_degree } => bcghost_cli::run_verify(*s, *max_degree, cli.seed),
        Command::Verify { suite: None, max_degree } => bcghost_cli::run_verify_all(*max_degree, cli.seed),
        Command::Vacuum { curve, cutoff } => bcghost_cli::run_vacuum(&read(curve)?, *cutoff),
        Command::Sew { curve, q_order, window, base_cutoff } => {
            let base_cutoff = base_cutoff.unwrap_or(2 * *q_order as i64 + window + 5);
            let opts = SewOptions { window: *window, base_cutoff, seed: cli.seed };
            bcghost_cli::run_sew(&read(curve)?, *q_order, &opts)
        }
        Command::Preferred { data, cutoff } => bcghost_cli::run_preferred(&read(data)?, *cutoff),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &out.json) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", out.json),
    }
    if out.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
