//! `twi`: delay PMFs, TWI synthesis and experiment runs from the command line.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "twi",
    version,
    about = "Temporal-window synthesis for multi-hop sensing paths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the PMF of one delay stage as CSV with a moment footer.
    Pmf(StageArgs),
    /// Solve both policies for the paths in a config file.
    Optimize {
        config: PathBuf,
        /// Emit a JSON document instead of the text report.
        #[arg(long)]
        json: bool,
    },
    /// Run a scenario or sweep config and write CSV.
    Experiment {
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a stage PMF against seeded simulation.
    Validate(ValidateArgs),
    /// Print the effective configuration (defaults filled in).
    Config { config: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StageKind {
    /// Propagation to a sensor plus its computation.
    N1,
    /// Grant-free hop plus receiver computation.
    N2,
    /// Truncated-geometric access stage.
    Geom,
}

#[derive(Debug, Clone, Args)]
pub struct StageArgs {
    #[arg(long, value_enum)]
    pub stage: StageKind,
    /// Cell radius in m.
    #[arg(long = "D", visible_alias = "d", default_value_t = 100.0)]
    pub d_m: f64,
    /// Signal speed in m/ms.
    #[arg(long = "v", default_value_t = 3e5)]
    pub v_m_per_ms: f64,
    /// Computation lower bound in ms.
    #[arg(long, default_value_t = 0.0)]
    pub cmin: f64,
    /// Computation upper bound in ms.
    #[arg(long, default_value_t = 0.0)]
    pub cmax: f64,
    /// Frame duration in ms.
    #[arg(long, default_value_t = 10.0)]
    pub tf: f64,
    /// Per-attempt hop failure probability (n2).
    #[arg(long)]
    pub rho: Option<f64>,
    /// Hop attempt limit (n2).
    #[arg(long)]
    pub amax: Option<u32>,
    /// Per-attempt failure probability (geom).
    #[arg(long)]
    pub fail: Option<f64>,
    /// Attempt limit (geom).
    #[arg(long)]
    pub limit: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub stage: StageArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Master seed; defaults to $TWI_SEED, then 1.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.01)]
    pub tv_tol: f64,
    #[arg(long, default_value_t = 0.005)]
    pub mean_rel_tol: f64,
    #[arg(long, default_value_t = 0.02)]
    pub var_rel_tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Pmf(args) => commands::pmf(&args),
        Command::Optimize { config, json } => commands::optimize(&config, json),
        Command::Experiment { config, out } => commands::experiment(&config, out.as_deref()),
        Command::Validate(args) => commands::validate(&args),
        Command::Config { config } => commands::show_config(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twi: {e}");
            e.exit_code()
        }
    }
}
