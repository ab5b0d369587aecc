//! `polylab`: sampling, exact formulas, quadrature and Monte Carlo checks
//! for random polygons.
//!
//! Exit codes: 0 success, 1 convergence or statistical failure, 2 usage error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "polylab", version, about = "Random polygon experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct SeedArg {
    /// RNG seed; overrides POLYLAB_SEED.
    #[arg(long, env = "POLYLAB_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct ChainArgs {
    /// Crankshaft moves between recorded samples (default: n).
    #[arg(long)]
    pub thinning: Option<u64>,
    /// Crankshaft moves discarded at the start of each chain (default: 10 n).
    #[arg(long)]
    pub burn_in: Option<u64>,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct ExecArgs {
    /// Worker threads; 0 lets the pool decide, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct TolArgs {
    #[arg(long, default_value_t = 1e-11)]
    pub reltol: f64,
    #[arg(long, default_value_t = 1e-13)]
    pub abstol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_subdivisions: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write sampled polygons as CSV (`poly_id,edge_index,x,y[,z]`).
    Sample {
        /// hopf-gaussian-arm, hopf-gaussian-closed, symmetric-closed,
        /// equilateral-mcmc or radial:<law>.
        #[arg(long)]
        measure: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a closed-form quantity as JSON.
    Exact(commands::ExactArgs),
    /// Integrate a quantity against the two-edge or single-edge density.
    Integrate {
        #[arg(long)]
        n: u32,
        /// turning-angle, pair-norm or edge-moment.
        #[arg(long)]
        quantity: String,
        /// Moment order for edge-moment.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of a functional's mean.
    Estimate {
        /// curvature, surplus, turning-angle, torsion, edge-squared,
        /// edge-moment:<p>, chord:<k>, gyradius or length.
        #[arg(long)]
        quantity: String,
        #[arg(long)]
        measure: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 100_000)]
        count: u64,
        #[arg(long, default_value_t = polylab::montecarlo::DEFAULT_BATCH_SIZE)]
        batch_size: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        exec: ExecArgs,
        /// Expected value, or `exact` for the closed form when one is known.
        /// A mean farther than --sigmas standard errors exits with status 1.
        #[arg(long)]
        expect: Option<String>,
        #[arg(long, default_value_t = 4.0)]
        sigmas: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fraction of closed polygons with total curvature below a threshold.
    Census {
        #[arg(long)]
        n: usize,
        /// Threshold as a multiple of 2 pi.
        #[arg(long, default_value_t = 2.0)]
        threshold: f64,
        #[arg(long, default_value_t = 1_000_000)]
        count: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV of mean curvature surplus over a range of n.
    Surplus {
        /// `a..b` (inclusive) or a comma-separated list.
        #[arg(long)]
        n_range: String,
        #[arg(long, default_value = "symmetric-closed")]
        measure: String,
        #[arg(long, default_value_t = 100_000)]
        count: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correct digits of quadrature and Monte Carlo against the exact
    /// expected total curvature.
    Compare {
        #[arg(long)]
        n_range: String,
        /// Comma-separated ensemble sizes.
        #[arg(long, default_value = "1000000")]
        mc_counts: String,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample { measure, n, d, count, seed, chain, out } => {
            commands::sample(&measure, n, d, count, seed.seed, chain, out)
        }
        Command::Exact(args) => commands::exact(&args),
        Command::Integrate { n, quantity, p, tol, out } => {
            commands::integrate(n, &quantity, p, tol, out)
        }
        Command::Estimate {
            quantity,
            measure,
            n,
            d,
            count,
            batch_size,
            seed,
            chain,
            exec,
            expect,
            sigmas,
            out,
        } => commands::estimate(commands::EstimateArgs {
            quantity,
            measure,
            n,
            d,
            count,
            batch_size,
            seed: seed.seed,
            chain,
            exec,
            expect,
            sigmas,
            out,
        }),
        Command::Census { n, threshold, count, seed, exec, out } => {
            commands::census(n, threshold, count, seed.seed, exec, out)
        }
        Command::Surplus { n_range, measure, count, seed, chain, exec, out } => {
            commands::surplus(&n_range, &measure, count, seed.seed, chain, exec, out)
        }
        Command::Compare { n_range, mc_counts, seed, tol, exec, out } => {
            commands::compare(&n_range, &mc_counts, seed.seed, tol, exec, out)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polylab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
