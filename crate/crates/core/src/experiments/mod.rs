//! Fixed two-path scenarios and randomized parameter sweeps.
//!
//! Trial `t` of every grid point draws from substream `t` of the master
//! seed, so grid points share random numbers and results do not depend on
//! how trials are scheduled across threads.

mod config;
mod report;
mod runner;

pub use config::{ExperimentConfig, ExperimentMode, SweepParameter, SweepSpec};
pub use report::{write_csv, ExperimentResult, GridPoint, PolicyStats};
pub use runner::{
    run_experiment, run_scenario, run_sweep, run_trials, scenario_paths, TrialOutcome,
};
