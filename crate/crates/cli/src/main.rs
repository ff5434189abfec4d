use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "mubforge",
    version,
    about = "Mutually unbiased vectors, triplets and parameter scans in dimension six"
)]
pub struct Cli {
    /// Emit a single JSON document instead of text or CSV.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub rng: u64,

    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "MUBFORGE_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// One of F, F6, D6, S6, B6, M6, K2, K3.
    #[arg(long)]
    pub family: String,

    /// Comma separated parameters, e.g. 0.3,-0.8.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub params: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a catalog matrix as CSV.
    Catalog {
        #[command(flatten)]
        family: FamilyArgs,
        /// Also report whether the matrix is Hadamard.
        #[arg(long)]
        verify: bool,
    },
    /// Collect the vectors unbiased to {I, H}.
    MuSearch {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 5000)]
        seeds: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble third bases from a vector set.
    Triplets {
        #[arg(long = "in")]
        input: PathBuf,
        /// Family of the pair the vectors came from; with --out, full
        /// triplet files are written as well.
        #[arg(long)]
        family: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        params: String,
        /// Directory receiving third_K.csv (and triplet_K.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for vectors unbiased to all three bases of a triplet.
    Extend {
        #[arg(long)]
        triplet: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        seeds: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Group a vector set into displacement orbits.
    Orbits {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Scan a family for triplets.
    Sweep {
        #[arg(long)]
        family: String,
        /// Cells per free axis.
        #[arg(long, conflicts_with = "random")]
        grid: Option<usize>,
        /// Number of uniformly sampled points.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 200)]
        seeds_per_point: usize,
        /// Seeds for the extension test at points with a triplet; 0 skips it.
        #[arg(long, default_value_t = 200)]
        extension_seeds: usize,
        /// K2 only: scan the triangle 0 <= x2 <= x1 <= pi/2.
        #[arg(long)]
        reduced: bool,
        /// Pinned parameters, `_` for free axes, e.g. 0,_,_.
        #[arg(long, allow_hyphen_values = true)]
        fixed: Option<String>,
        /// Keep collecting after the first third basis.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        bitmap: Option<PathBuf>,
    },
    /// Compare triplet maps at symmetry-related grid points.
    SymmetryCheck {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Test two matrices for Hadamard equivalence.
    Equivalence {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<mubforge_core::Error>() {
        Some(e) if e.is_numerical() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    match commands::run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
