//! Minimal-TWI synthesis under a global violation budget.
//!
//! Each path `k` must satisfy `TWI >= mu_k + sigma_k * theta(alpha_k)` with
//! `theta(a) = sqrt(a / (1 - a))`, and the per-path violations
//! `eps_k = 1 - (1 - p_k) alpha_k` must sum to at most `eps`. For a fixed TWI
//! the best admissible reliabilities are available in closed form, which
//! turns the program into a one-dimensional monotone feasibility search.

mod bisection;
mod uniform;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TwiError};
use crate::path_model::PathSummary;

pub use bisection::{solve_min_twi, solve_min_twi_with, BisectionOptions};
pub use uniform::{
    solve_uniform_baseline, solve_uniform_baseline_with, water_filling_threshold, UniformOptions,
    DEFAULT_ALPHA_CEILING_GAP,
};

/// Reliability floor of the optimal policy; `theta` is convex on `[1/4, 1)`.
pub const ALPHA_MIN: f64 = 0.25;

/// Default bisection width on TWI, in ms.
pub const DEFAULT_TOLERANCE_MS: f64 = 1e-3;

/// Global violation budget `eps` in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ReliabilityBudget(f64);

impl ReliabilityBudget {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon > 0.0 && epsilon < 1.0 {
            Ok(ReliabilityBudget(epsilon))
        } else {
            Err(TwiError::param(
                "epsilon",
                format!("must lie in (0, 1), got {epsilon}"),
            ))
        }
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ReliabilityBudget {
    type Error = TwiError;

    fn try_from(epsilon: f64) -> Result<Self> {
        ReliabilityBudget::new(epsilon)
    }
}

impl From<ReliabilityBudget> for f64 {
    fn from(budget: ReliabilityBudget) -> f64 {
        budget.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Optimal,
    Uniform,
}

impl Policy {
    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Optimal => "optimal",
            Policy::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathAllocation {
    /// Conditional on-time reliability given no drop.
    pub alpha: f64,
    /// Violation budget charged to the path, drops included.
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwiSolution {
    pub policy: Policy,
    pub feasible: bool,
    /// Window in ms; `None` when the instance is infeasible.
    pub twi: Option<f64>,
    pub per_path: Vec<PathAllocation>,
}

impl TwiSolution {
    pub(crate) fn infeasible(policy: Policy) -> Self {
        TwiSolution {
            policy,
            feasible: false,
            twi: None,
            per_path: Vec::new(),
        }
    }

    pub fn total_epsilon(&self) -> f64 {
        self.per_path.iter().map(|a| a.epsilon).sum()
    }
}

/// Cantelli margin multiplier `sqrt(alpha / (1 - alpha))`.
pub fn cantelli_theta(alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(TwiError::Domain { alpha });
    }
    Ok((alpha / (1.0 - alpha)).sqrt())
}

/// Largest reliability the Cantelli margin certifies at `twi`:
/// `y^2 / (y^2 + sigma^2)` with `y = max(twi - mu, 0)`.
pub fn alpha_cap(twi: f64, summary: &PathSummary) -> f64 {
    let y = (twi - summary.mean_ms).max(0.0);
    if y == 0.0 {
        return 0.0;
    }
    if summary.variance_ms2 == 0.0 {
        return 1.0;
    }
    let y2 = y * y;
    y2 / (y2 + summary.variance_ms2)
}

/// Reliability chosen for a path at `twi`: the cap clipped to `[ALPHA_MIN, 1]`.
pub fn best_alpha(twi: f64, summary: &PathSummary) -> f64 {
    alpha_cap(twi, summary).clamp(ALPHA_MIN, 1.0)
}

/// Feasibility map `sum_k (1 - p_k) alpha_k*(twi)`; the window is admissible
/// once it reaches `K - eps`.
pub fn feasibility_phi(twi: f64, summaries: &[PathSummary]) -> f64 {
    summaries
        .iter()
        .map(|s| (1.0 - s.drop_prob) * best_alpha(twi, s))
        .sum()
}

pub(crate) fn check_instance(summaries: &[PathSummary]) -> Result<()> {
    if summaries.is_empty() {
        return Err(TwiError::param("summaries", "need at least one path"));
    }
    for s in summaries {
        if !(s.mean_ms.is_finite() && s.mean_ms >= 0.0)
            || !(s.variance_ms2.is_finite() && s.variance_ms2 >= 0.0)
            || !(0.0..1.0).contains(&s.drop_prob)
        {
            return Err(TwiError::param(
                "summaries",
                format!("invalid path summary {s:?}"),
            ));
        }
    }
    Ok(())
}

pub(crate) fn total_drop(summaries: &[PathSummary]) -> f64 {
    summaries.iter().map(|s| s.drop_prob).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(mean: f64, sd: f64, p: f64) -> PathSummary {
        PathSummary::from_moments(mean, sd * sd, p).unwrap()
    }

    #[test]
    fn theta_values() {
        assert_eq!(cantelli_theta(0.0).unwrap(), 0.0);
        assert!((cantelli_theta(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((cantelli_theta(0.8).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(cantelli_theta(1.0), Err(TwiError::Domain { .. })));
        assert!(cantelli_theta(-0.1).is_err());
    }

    #[test]
    fn cap_values() {
        let s = summary(100.0, 10.0, 0.0);
        assert_eq!(alpha_cap(100.0, &s), 0.0);
        assert_eq!(alpha_cap(50.0, &s), 0.0);
        assert!((alpha_cap(110.0, &s) - 0.5).abs() < 1e-15);
        assert!((alpha_cap(120.0, &s) - 0.8).abs() < 1e-15);
        assert_eq!(alpha_cap(100.5, &summary(100.0, 0.0, 0.0)), 1.0);
    }

    #[test]
    fn phi_limits() {
        let paths = vec![summary(100.0, 10.0, 0.02), summary(300.0, 50.0, 0.05)];
        let floor = feasibility_phi(50.0, &paths);
        assert!((floor - 0.25 * (0.98 + 0.95)).abs() < 1e-15);
        let top = feasibility_phi(1e12, &paths);
        assert!((top - (2.0 - 0.07)).abs() < 1e-9);
        let single = vec![summary(100.0, 10.0, 0.0)];
        assert!((feasibility_phi(120.0, &single) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn budget_domain() {
        assert!(ReliabilityBudget::new(0.0).is_err());
        assert!(ReliabilityBudget::new(1.0).is_err());
        assert_eq!(ReliabilityBudget::new(0.1).unwrap().epsilon(), 0.1);
    }
}
