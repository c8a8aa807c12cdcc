use super::{
    cantelli_theta, check_instance, total_drop, PathAllocation, Policy, ReliabilityBudget,
    TwiSolution,
};
use crate::error::{Result, TwiError};
use crate::path_model::PathSummary;

/// Default distance of the clamped reliability from one.
pub const DEFAULT_ALPHA_CEILING_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformOptions {
    /// Reliabilities are clamped to at most `1 - alpha_ceiling_gap`, which keeps
    /// the margin finite when the threshold falls below a path's drop floor.
    /// A clamped path is charged its drop floor, so a wide gap can undercut
    /// the optimal window; the default keeps the baseline dominated.
    pub alpha_ceiling_gap: f64,
    /// Bisection width on the water level `tau`.
    pub tau_tolerance: f64,
}

impl Default for UniformOptions {
    fn default() -> Self {
        UniformOptions {
            alpha_ceiling_gap: DEFAULT_ALPHA_CEILING_GAP,
            tau_tolerance: 1e-12,
        }
    }
}

/// Water level `tau` in `[min_k p_k, 1)` with `sum_k max(p_k, tau) = eps`.
pub fn water_filling_threshold(drops: &[f64], epsilon: f64, tolerance: f64) -> Result<f64> {
    if drops.is_empty() {
        return Err(TwiError::param("summaries", "need at least one path"));
    }
    let level = |tau: f64| drops.iter().map(|&p| p.max(tau)).sum::<f64>();
    let mut lo = drops.iter().copied().fold(f64::INFINITY, f64::min);
    if level(lo) > epsilon {
        return Err(TwiError::Infeasible {
            total_drop: drops.iter().sum(),
            epsilon,
        });
    }
    let mut hi = 1.0;
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if level(mid) < epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn solve_uniform_baseline(
    summaries: &[PathSummary],
    budget: ReliabilityBudget,
) -> Result<TwiSolution> {
    solve_uniform_baseline_with(summaries, budget, &UniformOptions::default())
}

/// Raises every path to a common violation level above its drop floor and
/// sizes the window for the worst resulting Cantelli margin.
pub fn solve_uniform_baseline_with(
    summaries: &[PathSummary],
    budget: ReliabilityBudget,
    opts: &UniformOptions,
) -> Result<TwiSolution> {
    check_instance(summaries)?;
    if !(opts.alpha_ceiling_gap > 0.0 && opts.alpha_ceiling_gap < 1.0) {
        return Err(TwiError::param("alpha_ceiling_gap", "must lie in (0, 1)"));
    }
    let eps = budget.epsilon();
    if total_drop(summaries) > eps {
        return Ok(TwiSolution::infeasible(Policy::Uniform));
    }
    let drops: Vec<f64> = summaries.iter().map(|s| s.drop_prob).collect();
    let tau = water_filling_threshold(&drops, eps, opts.tau_tolerance)?;
    let ceiling = 1.0 - opts.alpha_ceiling_gap;

    let mut twi = f64::NEG_INFINITY;
    let mut per_path = Vec::with_capacity(summaries.len());
    for s in summaries {
        let epsilon = s.drop_prob.max(tau);
        let alpha = ((1.0 - epsilon) / (1.0 - s.drop_prob)).clamp(0.0, ceiling);
        let margin = if s.variance_ms2 == 0.0 {
            0.0
        } else {
            s.std_dev() * cantelli_theta(alpha)?
        };
        twi = twi.max(s.mean_ms + margin);
        per_path.push(PathAllocation { alpha, epsilon });
    }
    Ok(TwiSolution {
        policy: Policy::Uniform,
        feasible: true,
        twi: Some(twi),
        per_path,
    })
}
