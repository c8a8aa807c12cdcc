//! End-to-end delay law and drop probability of a causal path.
//!
//! A path with `h >= 1` sensors contributes
//!
//! ```text
//! T = T_1 + sum_{i=1}^{h-1} T_2,i + T_SR + T_PT
//! ```
//!
//! where `T_1` covers propagation to the first sensor plus its computation,
//! each `T_2,i` covers hop `i` plus the computation of the node receiving
//! it, and the final sensor's grant-based uplink carries no extra
//! computation. A path with `h = 0` is direct sensing by the base station and
//! keeps the continuous event-to-BS propagation law.

use serde::{Deserialize, Serialize};

use crate::delay_components::{
    event_propagation_moments, n1_pmf, n2_pmf, truncated_geometric_moments,
    truncated_geometric_pmf, ComputationSpec, PropagationKind, PropagationSpec, RetrySpec,
};
use crate::error::{Result, TwiError};
use crate::stage::{FrameTime, StageDistribution};

/// One sensor-to-sensor hop and the computation at its receiving node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopSpec {
    pub retry: RetrySpec,
    pub computation: ComputationSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub path_id: String,
    /// Number of sensors on the path; zero means direct BS sensing.
    pub hop_count: usize,
    pub propagation: PropagationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_computation: Option<ComputationSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hops: Vec<HopSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr: Option<RetrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pt: Option<RetrySpec>,
    #[serde(rename = "tf_ms")]
    pub frame: FrameTime,
}

impl PathSpec {
    /// Direct sensing by the base station.
    pub fn direct(
        path_id: impl Into<String>,
        cell_radius_m: f64,
        speed_m_per_ms: f64,
        frame: FrameTime,
    ) -> Result<Self> {
        let path = PathSpec {
            path_id: path_id.into(),
            hop_count: 0,
            propagation: PropagationSpec::new(
                cell_radius_m,
                speed_m_per_ms,
                PropagationKind::EventToBs,
            )?,
            first_computation: None,
            hops: Vec::new(),
            sr: None,
            pt: None,
            frame,
        };
        path.validate()?;
        Ok(path)
    }

    /// Relayed path with `hops.len() + 1` sensors.
    #[allow(clippy::too_many_arguments)]
    pub fn relayed(
        path_id: impl Into<String>,
        cell_radius_m: f64,
        speed_m_per_ms: f64,
        first_computation: ComputationSpec,
        hops: Vec<HopSpec>,
        sr: RetrySpec,
        pt: RetrySpec,
        frame: FrameTime,
    ) -> Result<Self> {
        let path = PathSpec {
            path_id: path_id.into(),
            hop_count: hops.len() + 1,
            propagation: PropagationSpec::new(
                cell_radius_m,
                speed_m_per_ms,
                PropagationKind::EventToSensor,
            )?,
            first_computation: Some(first_computation),
            hops,
            sr: Some(sr),
            pt: Some(pt),
            frame,
        };
        path.validate()?;
        Ok(path)
    }

    pub fn is_direct(&self) -> bool {
        self.hop_count == 0
    }

    pub fn validate(&self) -> Result<()> {
        let malformed = |reason: String| TwiError::MalformedPath {
            path_id: self.path_id.clone(),
            reason,
        };
        self.propagation.validate()?;
        if self.hop_count == 0 {
            if self.propagation.kind != PropagationKind::EventToBs {
                return Err(malformed(
                    "direct path must use event_to_bs propagation".into(),
                ));
            }
            if self.first_computation.is_some()
                || !self.hops.is_empty()
                || self.sr.is_some()
                || self.pt.is_some()
            {
                return Err(malformed(
                    "direct path cannot carry computation, hops or uplink stages".into(),
                ));
            }
            return Ok(());
        }
        if self.propagation.kind != PropagationKind::EventToSensor {
            return Err(malformed(
                "relayed path must use event_to_sensor propagation".into(),
            ));
        }
        if self.hops.len() != self.hop_count - 1 {
            return Err(malformed(format!(
                "{} sensors need {} hops, found {}",
                self.hop_count,
                self.hop_count - 1,
                self.hops.len()
            )));
        }
        match (&self.first_computation, &self.sr, &self.pt) {
            (Some(c1), Some(sr), Some(pt)) => {
                c1.validate()?;
                sr.validate()?;
                pt.validate()?;
            }
            _ => {
                return Err(malformed(
                    "relayed path needs first_computation, sr and pt".into(),
                ))
            }
        }
        for hop in &self.hops {
            hop.retry.validate()?;
            hop.computation.validate()?;
        }
        Ok(())
    }

    /// Stage PMFs in path order: `T_1`, each hop, SR, PT. Empty for a direct path.
    pub fn stage_distributions(&self) -> Result<Vec<StageDistribution>> {
        self.validate()?;
        if self.is_direct() {
            return Ok(Vec::new());
        }
        let c1 = self.first_computation.expect("validated");
        let mut stages = Vec::with_capacity(self.hops.len() + 3);
        stages.push(n1_pmf(&self.propagation, &c1, self.frame)?);
        for hop in &self.hops {
            stages.push(n2_pmf(&hop.retry, &hop.computation, self.frame)?);
        }
        stages.push(truncated_geometric_pmf(
            &self.sr.expect("validated"),
            self.frame,
        )?);
        stages.push(truncated_geometric_pmf(
            &self.pt.expect("validated"),
            self.frame,
        )?);
        Ok(stages)
    }
}

/// Moments and drop probability of a path, as consumed by the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSummary {
    pub mean_ms: f64,
    pub variance_ms2: f64,
    pub drop_prob: f64,
    /// Composed no-drop PMF; absent for direct paths and moment-only summaries.
    pub pmf: Option<StageDistribution>,
}

impl PathSummary {
    pub fn from_moments(mean_ms: f64, variance_ms2: f64, drop_prob: f64) -> Result<Self> {
        if !(mean_ms.is_finite() && mean_ms >= 0.0) {
            return Err(TwiError::param(
                "mean_ms",
                format!("must be >= 0, got {mean_ms}"),
            ));
        }
        if !(variance_ms2.is_finite() && variance_ms2 >= 0.0) {
            return Err(TwiError::param(
                "variance_ms2",
                format!("must be >= 0, got {variance_ms2}"),
            ));
        }
        if !(0.0..1.0).contains(&drop_prob) {
            return Err(TwiError::param(
                "drop_prob",
                format!("must lie in [0, 1), got {drop_prob}"),
            ));
        }
        Ok(PathSummary {
            mean_ms,
            variance_ms2,
            drop_prob,
            pmf: None,
        })
    }

    pub fn std_dev(&self) -> f64 {
        self.variance_ms2.sqrt()
    }
}

/// Full summary including the composed PMF of a relayed path.
pub fn summarize_path(path: &PathSpec) -> Result<PathSummary> {
    summarize(path, true)
}

/// Summary without the PMF convolution; moments are identical.
pub fn summarize_path_moments(path: &PathSpec) -> Result<PathSummary> {
    summarize(path, false)
}

fn summarize(path: &PathSpec, with_pmf: bool) -> Result<PathSummary> {
    path.validate()?;
    if path.is_direct() {
        let (mean, var) = event_propagation_moments(&path.propagation)?;
        return PathSummary::from_moments(mean, var, 0.0);
    }
    let c1 = path.first_computation.expect("validated");
    let sr = path.sr.expect("validated");
    let pt = path.pt.expect("validated");
    let drop = drop_probability(path)?;

    let t1 = n1_pmf(&path.propagation, &c1, path.frame)?;
    let hops = path
        .hops
        .iter()
        .map(|hop| n2_pmf(&hop.retry, &hop.computation, path.frame))
        .collect::<Result<Vec<_>>>()?;
    let (sr_mean, sr_var) = truncated_geometric_moments(&sr, path.frame)?;
    let (pt_mean, pt_var) = truncated_geometric_moments(&pt, path.frame)?;

    let mean = t1.mean() + hops.iter().map(|h| h.mean()).sum::<f64>() + sr_mean + pt_mean;
    let var = t1.variance() + hops.iter().map(|h| h.variance()).sum::<f64>() + sr_var + pt_var;
    let mut summary = PathSummary::from_moments(mean, var, drop)?;

    if with_pmf {
        let mut law = t1;
        for hop in &hops {
            law = law.convolve(hop)?;
        }
        law = law.convolve(&truncated_geometric_pmf(&sr, path.frame)?)?;
        law = law.convolve(&truncated_geometric_pmf(&pt, path.frame)?)?;
        summary.pmf = Some(law);
    }
    Ok(summary)
}

/// Probability that some stage of the path exhausts its retry budget.
///
/// `1 - prod_i (1 - rho_i^A_i) (1 - zeta^M) (1 - eps^N)`; zero for direct paths.
pub fn drop_probability(path: &PathSpec) -> Result<f64> {
    path.validate()?;
    if path.is_direct() {
        return Ok(0.0);
    }
    let survive_hops: f64 = path
        .hops
        .iter()
        .map(|hop| 1.0 - hop.retry.exhaustion_prob())
        .product();
    let sr = path.sr.expect("validated");
    let pt = path.pt.expect("validated");
    Ok(1.0 - survive_hops * (1.0 - sr.exhaustion_prob()) * (1.0 - pt.exhaustion_prob()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tf() -> FrameTime {
        FrameTime::new(10.0).unwrap()
    }

    fn two_sensor_path() -> PathSpec {
        PathSpec::relayed(
            "p",
            100.0,
            3e5,
            ComputationSpec::new(10.0, 200.0).unwrap(),
            vec![HopSpec {
                retry: RetrySpec::new(0.5, 2).unwrap(),
                computation: ComputationSpec::new(0.0, 10.0).unwrap(),
            }],
            RetrySpec::new(0.1, 2).unwrap(),
            RetrySpec::new(0.1, 2).unwrap(),
            tf(),
        )
        .unwrap()
    }

    #[test]
    fn direct_path_moments() {
        let path = PathSpec::direct("bs", 100.0, 3e5, tf()).unwrap();
        let s = summarize_path(&path).unwrap();
        assert!((s.mean_ms - 200.0 / 9e5).abs() < 1e-18);
        assert!((s.variance_ms2 - 1e4 / (18.0 * 9e10)).abs() < 1e-20);
        assert_eq!(s.drop_prob, 0.0);
        assert!(s.pmf.is_none());
    }

    #[test]
    fn single_sensor_mean_is_sum_of_stages() {
        let c1 = ComputationSpec::new(10.0, 200.0).unwrap();
        let sr = RetrySpec::new(0.07, 3).unwrap();
        let pt = RetrySpec::new(0.04, 5).unwrap();
        let path = PathSpec::relayed("p", 100.0, 3e5, c1, vec![], sr, pt, tf()).unwrap();
        let s = summarize_path(&path).unwrap();
        let t1 = n1_pmf(&path.propagation, &c1, tf()).unwrap();
        let (m_sr, _) = truncated_geometric_moments(&sr, tf()).unwrap();
        let (m_pt, _) = truncated_geometric_moments(&pt, tf()).unwrap();
        assert_eq!(s.mean_ms, t1.mean() + m_sr + m_pt);
        let pmf = s.pmf.unwrap();
        assert!((pmf.mean() - s.mean_ms).abs() / s.mean_ms < 1e-9);
        assert!((pmf.variance() - s.variance_ms2).abs() / s.variance_ms2 < 1e-9);
    }

    #[test]
    fn drop_probability_enumerated() {
        let p = drop_probability(&two_sensor_path()).unwrap();
        assert!((p - 0.264925).abs() < 1e-12, "{p}");
    }

    #[test]
    fn zero_failure_never_drops() {
        let zero = RetrySpec::new(0.0, 3).unwrap();
        let path = PathSpec::relayed(
            "p",
            100.0,
            0.3,
            ComputationSpec::new(0.0, 10.0).unwrap(),
            vec![HopSpec {
                retry: zero,
                computation: ComputationSpec::new(0.0, 10.0).unwrap(),
            }],
            zero,
            zero,
            tf(),
        )
        .unwrap();
        assert_eq!(drop_probability(&path).unwrap(), 0.0);
        assert_eq!(
            drop_probability(&PathSpec::direct("bs", 100.0, 0.3, tf()).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn rejects_inconsistent_structure() {
        let mut path = two_sensor_path();
        path.hop_count = 3;
        assert!(matches!(
            path.validate(),
            Err(TwiError::MalformedPath { .. })
        ));

        let mut path = two_sensor_path();
        path.sr = None;
        assert!(summarize_path(&path).is_err());

        let mut direct = PathSpec::direct("bs", 100.0, 0.3, tf()).unwrap();
        direct.pt = Some(RetrySpec::new(0.1, 2).unwrap());
        assert!(drop_probability(&direct).is_err());

        let mut wrong_kind = two_sensor_path();
        wrong_kind.propagation.kind = PropagationKind::EventToBs;
        assert!(wrong_kind.validate().is_err());
    }

    #[test]
    fn support_max_is_sum_of_stage_maxima() {
        let path = two_sensor_path();
        let stages = path.stage_distributions().unwrap();
        let s = summarize_path(&path).unwrap();
        let pmf = s.pmf.unwrap();
        let expected: i64 = stages.iter().map(|d| d.n_max()).sum();
        assert_eq!(pmf.n_max(), expected);
        assert!((pmf.cdf(pmf.n_max() as f64 * 10.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn moment_only_summary_agrees() {
        let path = two_sensor_path();
        let a = summarize_path(&path).unwrap();
        let b = summarize_path_moments(&path).unwrap();
        assert_eq!(a.mean_ms, b.mean_ms);
        assert_eq!(a.variance_ms2, b.variance_ms2);
        assert_eq!(a.drop_prob, b.drop_prob);
        assert!(b.pmf.is_none());
    }
}
