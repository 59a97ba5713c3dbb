use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod fit;
mod output;
mod simulate;
mod sweep;
mod verify;

/// Exit status classes.
#[derive(Debug)]
pub enum Failure {
    /// Bad configuration or arguments (exit 1).
    Validation(anyhow::Error),
    /// The computation itself failed (exit 2).
    Runtime(anyhow::Error),
    /// A check ran and did not pass (exit 3).
    Acceptance(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Runtime(_) => 2,
            Failure::Acceptance(_) => 3,
        }
    }
}

/// Route a library error to the validation or runtime class.
pub fn classify(e: nsdecay_core::Error) -> Failure {
    use nsdecay_core::Error as E;
    match e {
        E::InvalidGrid(_) | E::InvalidParameter { .. } | E::FitWindow(_) | E::Stability(_) | E::SmallnessViolated { .. } => {
            Failure::Validation(e.into())
        }
        _ => Failure::Runtime(e.into()),
    }
}

pub type CliResult<T> = Result<T, Failure>;

#[derive(Parser)]
#[command(name = "nsdecay", version, about = "Decay experiments for 2-D inhomogeneous Navier-Stokes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write a run directory.
    Simulate {
        config: PathBuf,
        /// Output directory (default: `run` next to the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a power law to one cached norm of a run directory.
    DecayFit {
        run_dir: PathBuf,
        #[arg(long, default_value = "L2")]
        norm: String,
        #[arg(long)]
        t_min: f64,
        #[arg(long)]
        t_max: f64,
        /// Horizon for runs without report.json.
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Run a property suite (`lp`, `besov`, `bony`, `pressure`, `lemmas`, `solver` or `all`).
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Where to write results.json.
        #[arg(long, default_value = "results.json")]
        out: PathBuf,
    },
    /// Run the cartesian product of parameter overrides.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        sigma: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        seed: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        rho: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn threads() -> CliResult<usize> {
    match std::env::var("NSDECAY_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Validation(anyhow::anyhow!("NSDECAY_THREADS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(1),
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let n = threads()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Runtime(e.into()))?;
    match cli.command {
        Command::Simulate { config, out } => simulate::cmd(&config, out),
        Command::DecayFit { run_dir, norm, t_min, t_max, horizon } => fit::cmd(&run_dir, &norm, t_min, t_max, horizon),
        Command::Verify { suite, seed, out } => verify::cmd(&suite, seed, &out),
        Command::Sweep { config, sigma, seed, rho, out } => sweep::cmd(&config, &sigma, &seed, &rho, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Validation(e) => eprintln!("error: {e:#}"),
                Failure::Runtime(e) => eprintln!("runtime failure: {e:#}"),
                Failure::Acceptance(msg) => eprintln!("FAIL: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}
