use std::io::Write;
use std::path::Path;

use serde::Serialize;
use twi_core::experiments::{run_experiment, write_csv};
use twi_core::monte_carlo::{empirical_stage_pmf, StageSpec};
use twi_core::optimizer::{solve_uniform_baseline_with, UniformOptions};
use twi_core::{
    solve_min_twi, ComputationSpec, FrameTime, PathSummary, PropagationKind, PropagationSpec,
    ReliabilityBudget, RetrySpec, StageDistribution, TwiSolution,
};

use crate::config::{self, AnyConfig};
use crate::error::{CliError, CliResult};
use crate::{StageArgs, StageKind, ValidateArgs};

fn missing(flag: &str, stage: &str) -> CliError {
    CliError::Invalid(format!("--{flag} is required for --stage {stage}"))
}

fn stage_spec(args: &StageArgs) -> CliResult<StageSpec> {
    let tf_ms = FrameTime::new(args.tf)?;
    let spec = match args.stage {
        StageKind::N1 => StageSpec::N1 {
            propagation: PropagationSpec::new(
                args.d_m,
                args.v_m_per_ms,
                PropagationKind::EventToSensor,
            )?,
            computation: ComputationSpec::new(args.cmin, args.cmax)?,
            tf_ms,
        },
        StageKind::N2 => StageSpec::N2 {
            retry: RetrySpec::new(
                args.rho.ok_or_else(|| missing("rho", "n2"))?,
                args.amax.ok_or_else(|| missing("amax", "n2"))?,
            )?,
            computation: ComputationSpec::new(args.cmin, args.cmax)?,
            tf_ms,
        },
        StageKind::Geom => StageSpec::Geometric {
            retry: RetrySpec::new(
                args.fail.ok_or_else(|| missing("fail", "geom"))?,
                args.limit.ok_or_else(|| missing("limit", "geom"))?,
            )?,
            tf_ms,
        },
    };
    Ok(spec)
}

fn write_pmf<W: Write>(pmf: &StageDistribution, mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,delay_ms,mass")?;
    for (n, delay, mass) in pmf.iter() {
        writeln!(out, "{n},{delay},{mass}")?;
    }
    writeln!(out, "# mean_ms={}", pmf.mean())?;
    writeln!(out, "# variance_ms2={}", pmf.variance())
}

pub fn pmf(args: &StageArgs) -> CliResult<()> {
    let pmf = stage_spec(args)?.analytical_pmf()?;
    write_pmf(&pmf, std::io::stdout().lock())?;
    Ok(())
}

pub fn validate(args: &ValidateArgs) -> CliResult<()> {
    let spec = stage_spec(&args.stage)?;
    let seed = match args.seed {
        Some(s) => s,
        None => config::env_seed()?.unwrap_or(1),
    };
    let exact = spec.analytical_pmf()?;
    let empirical = empirical_stage_pmf(&spec, args.samples, seed)?;
    let tv = exact.total_variation(&empirical);
    let rel = |a: f64, b: f64| {
        if a == 0.0 {
            (b - a).abs()
        } else {
            ((b - a) / a).abs()
        }
    };
    let mean_err = rel(exact.mean(), empirical.mean());
    let var_err = rel(exact.variance(), empirical.variance());

    println!("samples        {}", args.samples);
    println!("seed           {seed}");
    println!(
        "mean_ms        analytical {:.6}  empirical {:.6}  rel_err {:.3e}",
        exact.mean(),
        empirical.mean(),
        mean_err
    );
    println!(
        "variance_ms2   analytical {:.6}  empirical {:.6}  rel_err {:.3e}",
        exact.variance(),
        empirical.variance(),
        var_err
    );
    println!("tv_distance    {tv:.6}");

    let mut breaches = Vec::new();
    if tv > args.tv_tol {
        breaches.push(format!("TV {tv:.4} > {}", args.tv_tol));
    }
    if mean_err > args.mean_rel_tol {
        breaches.push(format!(
            "mean rel err {mean_err:.3e} > {}",
            args.mean_rel_tol
        ));
    }
    if var_err > args.var_rel_tol {
        breaches.push(format!(
            "variance rel err {var_err:.3e} > {}",
            args.var_rel_tol
        ));
    }
    if breaches.is_empty() {
        println!("status         ok");
        Ok(())
    } else {
        println!("status         breach");
        Err(CliError::Tolerance(breaches.join("; ")))
    }
}

#[derive(Serialize)]
struct PathRow<'a> {
    path_id: &'a str,
    mean_ms: f64,
    variance_ms2: f64,
    drop_prob: f64,
}

#[derive(Serialize)]
struct OptimizeReport<'a> {
    epsilon: f64,
    paths: Vec<PathRow<'a>>,
    optimal: &'a TwiSolution,
    uniform: &'a TwiSolution,
}

fn print_solution(name: &str, sol: &TwiSolution, ids: &[&str]) {
    match sol.twi {
        Some(twi) => {
            println!("{name}: TWI = {twi:.6} ms");
            for (id, a) in ids.iter().zip(&sol.per_path) {
                println!("  {id:<16} alpha {:.6}  eps {:.6}", a.alpha, a.epsilon);
            }
        }
        None => println!("{name}: infeasible"),
    }
}

pub fn optimize(path: &Path, json: bool) -> CliResult<()> {
    let cfg = config::load_optimize(path)?;
    let budget = ReliabilityBudget::new(cfg.epsilon)?;
    let resolved = cfg.resolve()?;
    let summaries: Vec<PathSummary> = resolved.iter().map(|(_, s)| s.clone()).collect();
    let ids: Vec<&str> = resolved.iter().map(|(id, _)| id.as_str()).collect();

    let optimal = solve_min_twi(&summaries, budget, cfg.tolerance_ms)?;
    let uniform = solve_uniform_baseline_with(
        &summaries,
        budget,
        &UniformOptions {
            alpha_ceiling_gap: cfg.uniform_alpha_gap,
            ..UniformOptions::default()
        },
    )?;

    if json {
        let report = OptimizeReport {
            epsilon: cfg.epsilon,
            paths: resolved
                .iter()
                .map(|(id, s)| PathRow {
                    path_id: id,
                    mean_ms: s.mean_ms,
                    variance_ms2: s.variance_ms2,
                    drop_prob: s.drop_prob,
                })
                .collect(),
            optimal: &optimal,
            uniform: &uniform,
        };
        let text =
            serde_json::to_string_pretty(&report).map_err(|e| CliError::Invalid(e.to_string()))?;
        println!("{text}");
    } else {
        println!("epsilon = {}", cfg.epsilon);
        println!(
            "{:<16} {:>12} {:>12} {:>10}",
            "path", "mean_ms", "std_ms", "p_drop"
        );
        for (id, s) in &resolved {
            println!(
                "{id:<16} {:>12.4} {:>12.4} {:>10.6}",
                s.mean_ms,
                s.std_dev(),
                s.drop_prob
            );
        }
        print_solution("optimal", &optimal, &ids);
        print_solution("uniform", &uniform, &ids);
    }

    if optimal.feasible && uniform.feasible {
        Ok(())
    } else {
        let total: f64 = summaries.iter().map(|s| s.drop_prob).sum();
        Err(CliError::Infeasible(format!(
            "total drop probability {total:.6} exceeds epsilon {}",
            cfg.epsilon
        )))
    }
}

pub fn experiment(path: &Path, out: Option<&Path>) -> CliResult<()> {
    let cfg = config::load_experiment(path)?;
    let result = run_experiment(&cfg)?;
    match out {
        Some(file) => write_csv(&result, std::fs::File::create(file)?)?,
        None => write_csv(&result, std::io::stdout().lock())?,
    }
    Ok(())
}

pub fn show_config(path: &Path) -> CliResult<()> {
    let text = match config::load_any(path)? {
        AnyConfig::Experiment(cfg) => config::to_toml(cfg.as_ref())?,
        AnyConfig::Optimize(cfg) => config::to_toml(&cfg)?,
    };
    print!("{text}");
    Ok(())
}
