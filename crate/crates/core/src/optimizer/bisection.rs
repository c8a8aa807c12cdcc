use super::{
    best_alpha, check_instance, feasibility_phi, total_drop, PathAllocation, Policy,
    ReliabilityBudget, TwiSolution, DEFAULT_TOLERANCE_MS,
};
use crate::error::{Result, TwiError};
use crate::path_model::PathSummary;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionOptions {
    /// Final bracket width in ms.
    pub tolerance_ms: f64,
    /// Cap on bracket doublings plus halvings.
    pub max_iterations: usize,
    /// The upper bracket starts at `max_k (mu_k + initial_sigmas * sigma_k)`.
    pub initial_sigmas: f64,
}

impl Default for BisectionOptions {
    fn default() -> Self {
        BisectionOptions {
            tolerance_ms: DEFAULT_TOLERANCE_MS,
            max_iterations: 10_000,
            initial_sigmas: 100.0,
        }
    }
}

/// Minimal TWI with tolerance `tol_ms` and default bracket settings.
pub fn solve_min_twi(
    summaries: &[PathSummary],
    budget: ReliabilityBudget,
    tol_ms: f64,
) -> Result<TwiSolution> {
    solve_min_twi_with(
        summaries,
        budget,
        &BisectionOptions {
            tolerance_ms: tol_ms,
            ..BisectionOptions::default()
        },
    )
}

/// Bisection on the window: the feasible set `{TWI : Phi(TWI) >= K - eps}` is
/// an interval because `Phi` is nondecreasing, so the smallest admissible
/// point is bracketed between `max_k mu_k` and a grown upper bound.
pub fn solve_min_twi_with(
    summaries: &[PathSummary],
    budget: ReliabilityBudget,
    opts: &BisectionOptions,
) -> Result<TwiSolution> {
    check_instance(summaries)?;
    if !(opts.tolerance_ms > 0.0) {
        return Err(TwiError::param("tolerance_ms", "must be > 0"));
    }
    let eps = budget.epsilon();
    if total_drop(summaries) > eps {
        return Ok(TwiSolution::infeasible(Policy::Optimal));
    }
    let k = summaries.len() as f64;
    let target = k - eps;
    let accept = |twi: f64| feasibility_phi(twi, summaries) >= target;

    let mut lo = summaries
        .iter()
        .map(|s| s.mean_ms)
        .fold(f64::NEG_INFINITY, f64::max);
    let twi = if accept(lo) {
        lo
    } else {
        let mut span = summaries
            .iter()
            .map(|s| s.mean_ms + opts.initial_sigmas * s.std_dev())
            .fold(f64::NEG_INFINITY, f64::max)
            - lo;
        if !(span > 0.0) {
            span = 1.0;
        }
        let mut hi = lo + span;
        let mut iterations = 0;
        while !accept(hi) {
            lo = hi;
            span *= 2.0;
            hi = lo + span;
            iterations += 1;
            if iterations > opts.max_iterations || !hi.is_finite() {
                return Err(TwiError::NonConvergence { iterations });
            }
        }
        while hi - lo > opts.tolerance_ms {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if accept(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            iterations += 1;
            if iterations > opts.max_iterations {
                return Err(TwiError::NonConvergence { iterations });
            }
        }
        hi
    };

    let per_path = summaries
        .iter()
        .map(|s| {
            let alpha = best_alpha(twi, s);
            PathAllocation {
                alpha,
                epsilon: 1.0 - (1.0 - s.drop_prob) * alpha,
            }
        })
        .collect();
    Ok(TwiSolution {
        policy: Policy::Optimal,
        feasible: true,
        twi: Some(twi),
        per_path,
    })
}
