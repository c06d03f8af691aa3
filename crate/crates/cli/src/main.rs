//! Experiment runner over the Weierstrass family y^2 = x^3 + ax + b.
//!
//! Subcommands: `duke`, `blcount`, `tx`, `equidist`, `derangement`,
//! `sieve`. Tables are written as CSV or JSON to `--out` (stdout when
//! omitted); human-readable summaries go to stderr. Identical
//! configurations produce byte-identical files regardless of `--shards`
//! or the worker count, which `GALOIS_SIEVE_THREADS` may override.

mod commands;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "galois-sieve",
    version,
    about = "Batch experiments over the Weierstrass family; emits CSV/JSON tables",
    after_help = "Batch-only tool: reads flags, writes tables, exits. There is no interactive mode."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// Height bound(s); repeat the flag for multi-height commands.
    #[arg(long = "height")]
    height: Vec<u64>,

    /// Primes ell to inspect.
    #[arg(long = "ell")]
    ell: Vec<u64>,

    /// Prime budget: Frobenius data uses primes p <= budget.
    #[arg(long = "budget", default_value_t = 1000)]
    budget: u64,

    /// Primes p for per-prime family scans.
    #[arg(long = "primes")]
    primes: Vec<u64>,

    /// Number of work shards; affects scheduling only, never output bytes.
    #[arg(long = "shards", default_value_t = 0)]
    shards: usize,

    /// Seed for randomized probes.
    #[arg(long = "seed", default_value_t = 1)]
    seed: u64,

    /// Output path; stdout when omitted.
    #[arg(long = "out")]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long = "format", value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-curve mod-ell verdicts over a height box.
    Duke(CommonArgs),
    /// Non-surjective counts against the bound shape, per (x, ell).
    Blcount(CommonArgs),
    /// Least multiplicative-rank witness prime per curve.
    Tx(CommonArgs),
    /// Frobenius class deviations over the family mod p.
    Equidist(CommonArgs),
    /// Derangement proportions for the standard maximal subgroups.
    Derangement(CommonArgs),
    /// L(Q) and sieve bounds for the even-numerator demonstration set.
    Sieve(CommonArgs),
}

/// Resolved experiment configuration shared by every runner.
#[derive(Debug, Clone)]
pub struct Config {
    pub subcommand: &'static str,
    pub heights: Vec<u64>,
    pub ells: Vec<u64>,
    pub budget: u64,
    pub primes: Vec<u64>,
    pub shards: usize,
    pub seed: u64,
}

impl Config {
    fn from_args(subcommand: &'static str, args: &CommonArgs) -> Result<Config, CliError> {
        let heights = if args.height.is_empty() {
            match subcommand {
                "blcount" => vec![5, 10, 20, 40],
                "sieve" => vec![50],
                _ => vec![10],
            }
        } else {
            args.height.clone()
        };
        if heights.contains(&0) {
            return Err(CliError::Config("--height must be positive".into()));
        }
        let ells = if args.ell.is_empty() {
            match subcommand {
                "equidist" => vec![2],
                _ => vec![2, 3, 5, 7, 11, 13],
            }
        } else {
            args.ell.clone()
        };
        for &l in &ells {
            if !galois_sieve_core::modarith::is_prime(l) {
                return Err(CliError::Config(format!("--ell values must be prime, got {l}")));
            }
        }
        if args.budget > 100_000 {
            return Err(CliError::Config(format!(
                "--budget {} exceeds the desk-scale cap of 100000 (character tables grow with the sum of all primes below the budget)",
                args.budget
            )));
        }
        let primes = if args.primes.is_empty() {
            vec![101, 1009, 10007]
        } else {
            args.primes.clone()
        };
        for &p in &primes {
            if p > 100_000 {
                return Err(CliError::Config(format!(
                    "--primes {p} exceeds the desk-scale cap of 100000"
                )));
            }
        }
        let shards = if args.shards == 0 {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        } else {
            args.shards
        };
        Ok(Config {
            subcommand,
            heights,
            ells,
            budget: args.budget,
            primes,
            shards,
            seed: args.seed,
        })
    }

    pub fn single_height(&self) -> Result<u64, CliError> {
        if self.heights.len() != 1 {
            return Err(CliError::Config(format!(
                "{} takes exactly one --height",
                self.subcommand
            )));
        }
        Ok(self.heights[0])
    }

    pub fn single_ell(&self) -> Result<u64, CliError> {
        if self.ells.len() != 1 {
            return Err(CliError::Config(format!(
                "{} takes exactly one --ell",
                self.subcommand
            )));
        }
        Ok(self.ells[0])
    }

    /// Config block embedded in JSON output. Sharding and worker counts
    /// are deliberately absent so they cannot influence output bytes.
    fn as_json(&self) -> serde_json::Value {
        serde_json::json!({
            "subcommand": self.subcommand,
            "heights": self.heights,
            "ells": self.ells,
            "budget": self.budget,
            "primes": self.primes,
            "seed": self.seed,
        })
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Internal(String),
}

fn init_thread_pool() -> Result<(), CliError> {
    match std::env::var("GALOIS_SIEVE_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .map_err(|_| CliError::Config(format!("GALOIS_SIEVE_THREADS={raw} is not a thread count")))?;
            if n == 0 {
                return Err(CliError::Config("GALOIS_SIEVE_THREADS must be positive".into()));
            }
            #[cfg(feature = "parallel")]
            {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
            }
            Ok(())
        }
    }
}

fn run() -> Result<(), CliError> {
    init_thread_pool()?;
    let cli = Cli::parse();
    let (cfg, args) = match &cli.command {
        Command::Duke(a) => (Config::from_args("duke", a)?, a),
        Command::Blcount(a) => (Config::from_args("blcount", a)?, a),
        Command::Tx(a) => (Config::from_args("tx", a)?, a),
        Command::Equidist(a) => (Config::from_args("equidist", a)?, a),
        Command::Derangement(a) => (Config::from_args("derangement", a)?, a),
        Command::Sieve(a) => (Config::from_args("sieve", a)?, a),
    };

    let table = match cfg.subcommand {
        "duke" => commands::run_duke(&cfg)?,
        "blcount" => commands::run_blcount(&cfg)?,
        "tx" => commands::run_tx(&cfg)?,
        "equidist" => commands::run_equidist(&cfg)?,
        "derangement" => commands::run_derangement(&cfg)?,
        "sieve" => commands::run_sieve(&cfg)?,
        _ => unreachable!(),
    };

    let payload = match args.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(cfg.as_json()),
    };
    match &args.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(payload.as_bytes())
                .map_err(|e| CliError::Internal(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // invariant violations inside the library surface as panics
    let outcome = std::panic::catch_unwind(run);
    match outcome {
        Ok(Ok(())) => ExitCode::from(0),
        Ok(Err(CliError::Config(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(Err(CliError::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
