//! `cvoters`: closed-form sweeps, Condorcet and paradox estimates,
//! mean-field solutions and numerical checks, written as CSV or JSON.
//!
//! Exit codes: 0 success, 1 a verification suite found a violation,
//! 2 bad arguments or a computation error.

mod commands;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::table::Format;

/// Environment variable that replaces the default seed of 0.
pub const SEED_ENV: &str = "CVOTERS_SEED";

#[derive(Parser, Debug)]
#[command(name = "cvoters", version, about = "Correlated voter models: sweeps, estimates and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Worker threads for sampling (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Limit probability of a Condorcet winner over a grid of β.
    Guilbaud {
        #[arg(long, default_value = "meanfield")]
        model: String,
        /// `start:end:step`, inclusive.
        #[arg(long)]
        grid: String,
    },
    /// Paradox (and, for majority, Condorcet-winner) probability of one rule.
    Estimate(EstimateArgs),
    /// Mean-field solutions of each family over a grid of β.
    SolveMf {
        #[arg(long)]
        grid: String,
    },
    /// Numerical checks; exits 1 on any violation.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Candidate range, e.g. `3..8`.
        #[arg(long, default_value = "3..8")]
        q: String,
        /// Random λ per q (cgf suite).
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
        /// Largest ‖λ‖ (cgf suite).
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
    },
    /// Eigenvalues of the uniform covariance of pairwise comparisons.
    Eigen {
        #[arg(long, default_value = "3..8")]
        q: String,
    },
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::MeanField)]
    model: ModelArg,
    #[arg(long, default_value_t = 3)]
    q: usize,
    /// Voters; pairs for the matching model.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Graph edges between 1-based voters, e.g. `1-2,2-3`.
    #[arg(long)]
    edges: Option<String>,
    /// Constitution: one rule for every pair or one per pair, comma separated
    /// (`maj`, `dict:i`, `anti:i`, `const:+1`, `const:-1`, `table:bits`).
    #[arg(long, default_value = "maj")]
    rule: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Mc)]
    method: MethodArg,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Defaults to $CVOTERS_SEED, or 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    MeanField,
    Matching,
    Graph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Enumerate all profiles.
    Exact,
    /// Exact magnetization sum (majority, three candidates, mean-field).
    Dp,
    /// Sampling.
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Cgf,
    Eigen,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verify(String),
}

impl From<correlated_voters::Error> for CliError {
    fn from(e: correlated_voters::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage(format!("i/o: {e}"))
    }
}

fn default_seed() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}={s:?} is not a u64"))),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.common.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let (table, verdict) = match cli.command {
        Command::Guilbaud { model, grid } => (commands::guilbaud(&model, &grid)?, Ok(())),
        Command::Estimate(a) => {
            let seed = match a.seed {
                Some(s) => s,
                None => default_seed()?,
            };
            let spec = commands::model_spec(a.model, a.q, a.n, a.beta, a.edges.as_deref())?;
            (commands::estimate(&spec, &a.rule, a.method, a.samples, seed)?, Ok(()))
        }
        Command::SolveMf { grid } => (commands::solve_mf(&grid)?, Ok(())),
        Command::Verify { suite, q, draws, radius } => {
            let range = commands::parse_range(&q)?;
            match suite {
                Suite::Cgf => commands::verify_cgf(range, draws, radius)?,
                Suite::Eigen => commands::verify_eigen(range)?,
            }
        }
        Command::Eigen { q } => (commands::eigen(commands::parse_range(&q)?)?, Ok(())),
    };
    let mut out: Box<dyn Write> = match &cli.common.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    table.write(cli.common.format, &mut out)?;
    out.flush()?;
    verdict
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
