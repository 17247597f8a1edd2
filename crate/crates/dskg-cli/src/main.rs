//! `dskg`: kernel evaluation, Cauchy solves, reference solvers, verification
//! suites and decay sweeps from the command line.

mod run;
mod settings;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tracing_subscriber::EnvFilter;

#[derive(Parser, Debug)]
#[command(
    name = "dskg",
    version,
    about = "Klein-Gordon kernels and Cauchy solvers on an expanding background"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Evaluate E(x,t;x0,t0) at one or more points x.
    Kernel,
    /// Solve the 1D Cauchy problem for a preset.
    Solve1d,
    /// Solve the Cauchy problem in n = 2 or 3 for a preset.
    SolveNd,
    /// Spectral reference solution for a preset (n = 1, or radial n = 3).
    Oracle,
    /// Run a verification suite: identities, riemann, realness or hypergeom.
    Verify,
    /// Measure ||u(t)||_q against the decay envelope.
    Decay,
    /// Sweep the kernel-integral bounds over z = e^t.
    Lemmas,
}

/// Every flag may also come from the config file under the same key.
#[derive(Args, Debug, Clone, Default)]
pub struct Params {
    /// Curved mass M >= 0.
    #[arg(long = "M", global = true)]
    pub m: Option<f64>,
    /// Space dimension (1, 2 or 3).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Time (final time for sweeps).
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Evaluation point(s); comma separated. In n dimensions one point's coordinates.
    #[arg(long, global = true, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Option<Vec<f64>>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, global = true)]
    pub t0: Option<f64>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    #[arg(long, global = true)]
    pub s: Option<f64>,
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    /// Weight exponent for the lemma sweep.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Relative quadrature tolerance (absolute is 1e-2 of it).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Grid size for solution slices.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Worker threads; defaults to available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory for CSV files and manifest.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat key = value file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[arg(long, global = true)]
    pub suite: Option<String>,
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            EnvFilter::try_from_env("DSKG_LOG").unwrap_or_else(|_| EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(run::exit_code(&e))
        }
    }
}
