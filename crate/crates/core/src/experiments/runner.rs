use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentMode};
use super::report::{ExperimentResult, GridPoint, PolicyStats};
use crate::error::{Result, TwiError};
use crate::monte_carlo::{random_topology, substream, Modality};
use crate::optimizer::{
    solve_min_twi, solve_uniform_baseline_with, Policy, ReliabilityBudget, TwiSolution,
    UniformOptions,
};
use crate::path_model::{summarize_path_moments, PathSpec, PathSummary};

/// Both policies' solutions for one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// Budget after the feasibility adjustment.
    pub epsilon: f64,
    pub total_drop: f64,
    pub optimal: TwiSolution,
    pub uniform: TwiSolution,
}

/// The two paths of a fixed scenario, with link parameters drawn from `rng`.
pub fn scenario_paths<R: rand::Rng + ?Sized>(
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<Vec<PathSpec>> {
    let (first, second) = match cfg.mode {
        ExperimentMode::ScenarioA => ((0, Modality::Light), (1, Modality::Light)),
        ExperimentMode::ScenarioB => ((0, Modality::Sound), (1, Modality::Sound)),
        ExperimentMode::ScenarioC => ((1, Modality::Light), (1, Modality::Sound)),
        ExperimentMode::Sweep => return Err(TwiError::param("mode", "not a fixed scenario")),
    };
    [first, second]
        .into_iter()
        .enumerate()
        .map(|(k, (h, m))| {
            cfg.ranges
                .draw_path(format!("path-{}", k + 1), h, m, cfg.d_m, cfg.tf_ms, rng)
        })
        .collect()
}

fn solve_trial(cfg: &ExperimentConfig, paths: &[PathSpec]) -> Result<TrialOutcome> {
    let summaries = paths
        .iter()
        .map(summarize_path_moments)
        .collect::<Result<Vec<PathSummary>>>()?;
    let total_drop: f64 = summaries.iter().map(|s| s.drop_prob).sum();
    let epsilon = cfg.epsilon.max(total_drop + cfg.feasibility_slack);
    let Ok(budget) = ReliabilityBudget::new(epsilon) else {
        return Ok(TrialOutcome {
            epsilon,
            total_drop,
            optimal: TwiSolution::infeasible(Policy::Optimal),
            uniform: TwiSolution::infeasible(Policy::Uniform),
        });
    };
    let optimal = solve_min_twi(&summaries, budget, cfg.tolerance_ms)?;
    let uniform = solve_uniform_baseline_with(
        &summaries,
        budget,
        &UniformOptions {
            alpha_ceiling_gap: cfg.uniform_alpha_gap,
            ..UniformOptions::default()
        },
    )?;
    Ok(TrialOutcome {
        epsilon,
        total_drop,
        optimal,
        uniform,
    })
}

/// All trials of a single grid point (or scenario), in trial order.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialOutcome>> {
    let topo = cfg.topology();
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(cfg.seed, t);
            let paths = match cfg.mode {
                ExperimentMode::Sweep => random_topology(&topo, &cfg.ranges, &mut rng)?,
                _ => scenario_paths(cfg, &mut rng)?,
            };
            solve_trial(cfg, &paths)
        })
        .collect()
}

fn aggregate(value: String, outcomes: &[TrialOutcome]) -> GridPoint {
    let stats = |policy: Policy| {
        let pick = |o: &'_ TrialOutcome| -> TwiSolution {
            match policy {
                Policy::Optimal => o.optimal.clone(),
                Policy::Uniform => o.uniform.clone(),
            }
        };
        let sols: Vec<TwiSolution> = outcomes.iter().map(pick).collect();
        let eps: Vec<Vec<f64>> = sols
            .iter()
            .map(|s| s.per_path.iter().map(|a| a.epsilon).collect())
            .collect();
        let samples: Vec<(f64, &[f64])> = sols
            .iter()
            .zip(&eps)
            .filter_map(|(s, e)| s.twi.map(|t| (t, e.as_slice())))
            .collect();
        let infeasible = sols.iter().filter(|s| !s.feasible).count();
        PolicyStats::from_samples(policy, &samples, infeasible)
    };
    GridPoint {
        value,
        optimal: stats(Policy::Optimal),
        uniform: stats(Policy::Uniform),
    }
}

pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    if cfg.mode == ExperimentMode::Sweep {
        return Err(TwiError::param("mode", "expected a scenario"));
    }
    let outcomes = run_trials(cfg)?;
    Ok(ExperimentResult {
        grid_column: "scenario".into(),
        points: vec![aggregate(cfg.mode.label().into(), &outcomes)],
    })
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| TwiError::param("sweep", "sweep mode needs a [sweep] table"))?;
    let points = sweep
        .values
        .iter()
        .map(|&v| {
            let point = cfg.at_grid_point(v)?;
            Ok(aggregate(v.to_string(), &run_trials(&point)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        grid_column: sweep.parameter.column().into(),
        points,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    match cfg.mode {
        ExperimentMode::Sweep => run_sweep(cfg),
        _ => run_scenario(cfg),
    }
}
