mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Failure;

#[derive(Parser, Debug)]
#[command(name = "sigman", version, about = "Energies of signals in Riemannian manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the command's columnar output as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Mesh step for region commands.
    #[arg(long, global = true)]
    pub grid: Option<f64>,
    /// Maximum descent iterations per restart for `embed`.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Quadrature points for the Fisher metric.
    #[arg(long, global = true)]
    pub quad: Option<usize>,
    /// Objective tolerance for `embed`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Omit wall-clock timing so reports are byte-for-byte reproducible.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Signal energies of curves and regions.
    #[command(subcommand)]
    Energy(EnergyCmd),
    /// Gaussian parameter spaces.
    #[command(subcommand)]
    Gaussian(GaussianCmd),
    /// Paths in configuration spaces.
    #[command(subcommand)]
    Config(ConfigCmd),
    /// Minimize the relative ratio variance of a graph in a manifold.
    Embed {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        manifold: PathBuf,
        /// Run simulated annealing after stalled descents.
        #[arg(long)]
        anneal: bool,
    },
    /// Run every verification corpus and print a summary table.
    VerifyAll,
}

#[derive(Subcommand, Debug)]
pub enum EnergyCmd {
    /// E1, E2 of a polyline from its first sample.
    Curve {
        #[arg(long)]
        path: PathBuf,
    },
    /// E1, E2 of a triangle mesh from its source vertices; the mesh's `b`
    /// mark, if any, is the target set.
    Region {
        #[arg(long)]
        mesh: PathBuf,
    },
    /// The rectangle [-1, 1] x [0, 1] measured from its top edge.
    Example22,
}

#[derive(Subcommand, Debug)]
pub enum GaussianCmd {
    /// Fisher metric of N(mu, sigma^2) by quadrature.
    Fisher {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long)]
        sigma: f64,
    },
    /// Lower bound E2 >= |q - p|_3^3 / 3 for a path of Gaussian parameters.
    Bound {
        #[arg(long)]
        path: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum ConfigCmd {
    /// Product-metric energies and per-particle energies.
    Energy {
        #[arg(long)]
        path: PathBuf,
    },
    /// Upper bounds and per-particle comparisons; `--check iii` adds the
    /// lower bound for monotone paths.
    Bounds {
        #[arg(long)]
        path: PathBuf,
        #[arg(long, value_parser = ["iii"])]
        check: Option<String>,
    },
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("SIGMAN_THREADS") else { return Ok(()) };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::BadInput(anyhow::anyhow!("SIGMAN_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::BadInput(anyhow::anyhow!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::CheckFailed(what)) => {
            eprintln!("check failed: {what}");
            ExitCode::from(1)
        }
        Err(Failure::BadInput(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
