use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::optimizer::Policy;

/// Aggregate over the feasible trials of one policy at one grid point.
/// Statistics are NaN when no trial was feasible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyStats {
    pub policy: Policy,
    pub mean_twi_ms: f64,
    /// Population standard deviation.
    pub std_twi_ms: f64,
    pub min_twi_ms: f64,
    pub max_twi_ms: f64,
    /// Mean allocated budget per path position.
    pub mean_eps_per_path: Vec<f64>,
    pub feasible_count: usize,
    pub infeasible_count: usize,
}

impl PolicyStats {
    /// `samples` holds `(twi, eps_per_path)` of each feasible trial in trial order.
    pub fn from_samples(
        policy: Policy,
        samples: &[(f64, &[f64])],
        infeasible_count: usize,
    ) -> Self {
        let n = samples.len();
        let nan = f64::NAN;
        if n == 0 {
            return PolicyStats {
                policy,
                mean_twi_ms: nan,
                std_twi_ms: nan,
                min_twi_ms: nan,
                max_twi_ms: nan,
                mean_eps_per_path: Vec::new(),
                feasible_count: 0,
                infeasible_count,
            };
        }
        let mean = samples.iter().map(|s| s.0).sum::<f64>() / n as f64;
        let var = samples.iter().map(|s| (s.0 - mean).powi(2)).sum::<f64>() / n as f64;
        let min = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        let max = samples
            .iter()
            .map(|s| s.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let width = samples.iter().map(|s| s.1.len()).max().unwrap_or(0);
        let mean_eps = (0..width)
            .map(|k| {
                let vals: Vec<f64> = samples.iter().filter_map(|s| s.1.get(k).copied()).collect();
                vals.iter().sum::<f64>() / vals.len() as f64
            })
            .collect();
        PolicyStats {
            policy,
            mean_twi_ms: mean,
            std_twi_ms: var.sqrt(),
            min_twi_ms: min,
            max_twi_ms: max,
            mean_eps_per_path: mean_eps,
            feasible_count: n,
            infeasible_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    /// Formatted grid coordinate, e.g. `"3"` for `path_count`.
    pub value: String,
    pub optimal: PolicyStats,
    pub uniform: PolicyStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    /// CSV column name of the grid coordinate.
    pub grid_column: String,
    pub points: Vec<GridPoint>,
}

impl ExperimentResult {
    pub fn point(&self, value: &str) -> Option<&GridPoint> {
        self.points.iter().find(|p| p.value == value)
    }
}

const HEADER_TAIL: [&str; 7] = [
    "policy",
    "mean_twi_ms",
    "std_twi_ms",
    "min_twi_ms",
    "max_twi_ms",
    "mean_eps_per_path",
    "infeasible_count",
];

/// One row per (grid point, policy), optimal first.
pub fn write_csv<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![result.grid_column.as_str()];
    header.extend(HEADER_TAIL);
    w.write_record(&header)?;
    for point in &result.points {
        for stats in [&point.optimal, &point.uniform] {
            let eps = stats
                .mean_eps_per_path
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(";");
            w.write_record([
                point.value.clone(),
                stats.policy.as_str().to_string(),
                stats.mean_twi_ms.to_string(),
                stats.std_twi_ms.to_string(),
                stats.min_twi_ms.to_string(),
                stats.max_twi_ms.to_string(),
                eps,
                stats.infeasible_count.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
