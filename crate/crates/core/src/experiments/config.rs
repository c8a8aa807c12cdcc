use serde::{Deserialize, Serialize};

use crate::error::{Result, TwiError};
use crate::monte_carlo::{
    DirectPathPolicy, IntRange, Interval, ParameterRanges, TopologySpec, ZetaSource,
};
use crate::optimizer::{ReliabilityBudget, DEFAULT_TOLERANCE_MS};
use crate::stage::FrameTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentMode {
    /// Direct light path plus a one-sensor light path.
    ScenarioA,
    /// Direct sound path plus a one-sensor sound path.
    ScenarioB,
    /// One-sensor light path plus one-sensor sound path.
    ScenarioC,
    /// Random topologies over a parameter grid.
    Sweep,
}

impl ExperimentMode {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentMode::ScenarioA => "A",
            ExperimentMode::ScenarioB => "B",
            ExperimentMode::ScenarioC => "C",
            ExperimentMode::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    PathCount,
    HMax,
    TfMs,
    DM,
    /// Per-attempt hop success `1 - rho`.
    HopSuccess,
    /// Per-attempt SR and PT success, swept jointly (`zeta = eps_link`).
    SrPtSuccess,
    Epsilon,
}

impl SweepParameter {
    pub fn column(self) -> &'static str {
        match self {
            SweepParameter::PathCount => "path_count",
            SweepParameter::HMax => "h_max",
            SweepParameter::TfMs => "tf_ms",
            SweepParameter::DM => "d_m",
            SweepParameter::HopSuccess => "hop_success",
            SweepParameter::SrPtSuccess => "sr_pt_success",
            SweepParameter::Epsilon => "epsilon",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, SweepParameter::PathCount | SweepParameter::HMax)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Fixed retry limit for success sweeps (A_max, or M = N).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_attempts: Option<u32>,
}

fn default_trials() -> usize {
    1000
}
fn default_seed() -> u64 {
    20_240_601
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE_MS
}
fn default_alpha_gap() -> f64 {
    1e-5
}
fn default_slack() -> f64 {
    1e-4
}
fn default_d() -> f64 {
    100.0
}
fn default_tf() -> FrameTime {
    FrameTime::new(10.0).expect("positive")
}
fn default_k() -> usize {
    3
}
fn default_h() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: ExperimentMode,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Global violation budget before the per-trial feasibility adjustment.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Budget raised to at least `sum p_k + feasibility_slack` per trial.
    #[serde(default = "default_slack")]
    pub feasibility_slack: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance_ms: f64,
    /// Baseline reliability clamp `1 - gap`. Wider than the solver default so
    /// saturated baselines land near 4.5e4 ms rather than diverging.
    #[serde(default = "default_alpha_gap")]
    pub uniform_alpha_gap: f64,
    #[serde(default = "default_d")]
    pub d_m: f64,
    #[serde(default = "default_tf")]
    pub tf_ms: FrameTime,
    #[serde(default = "default_k")]
    pub path_count: usize,
    #[serde(default = "default_h")]
    pub h_max: usize,
    #[serde(default)]
    pub direct_policy: DirectPathPolicy,
    #[serde(default)]
    pub ranges: ParameterRanges,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl ExperimentConfig {
    /// Defaults for `mode` with no sweep grid.
    pub fn new(mode: ExperimentMode) -> Self {
        ExperimentConfig {
            mode,
            trials: default_trials(),
            seed: default_seed(),
            epsilon: default_epsilon(),
            feasibility_slack: default_slack(),
            tolerance_ms: default_tolerance(),
            uniform_alpha_gap: default_alpha_gap(),
            d_m: default_d(),
            tf_ms: default_tf(),
            path_count: default_k(),
            h_max: default_h(),
            direct_policy: DirectPathPolicy::default(),
            ranges: ParameterRanges::default(),
            sweep: None,
        }
    }

    pub fn sweep(parameter: SweepParameter, values: Vec<f64>) -> Self {
        ExperimentConfig {
            sweep: Some(SweepSpec {
                parameter,
                values,
                max_attempts: None,
            }),
            ..ExperimentConfig::new(ExperimentMode::Sweep)
        }
    }

    pub fn topology(&self) -> TopologySpec {
        TopologySpec {
            path_count: self.path_count,
            h_max: self.h_max,
            d_m: self.d_m,
            tf_ms: self.tf_ms,
            direct_policy: self.direct_policy,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(TwiError::param("trials", "must be >= 1"));
        }
        ReliabilityBudget::new(self.epsilon)?;
        if !(self.feasibility_slack >= 0.0 && self.feasibility_slack < 1.0) {
            return Err(TwiError::param("feasibility_slack", "must lie in [0, 1)"));
        }
        if !(self.tolerance_ms > 0.0) {
            return Err(TwiError::param("tolerance_ms", "must be > 0"));
        }
        if !(self.uniform_alpha_gap > 0.0 && self.uniform_alpha_gap < 1.0) {
            return Err(TwiError::param("uniform_alpha_gap", "must lie in (0, 1)"));
        }
        self.ranges.validate()?;
        match (self.mode, &self.sweep) {
            (ExperimentMode::Sweep, None) => {
                return Err(TwiError::param("sweep", "sweep mode needs a [sweep] table"))
            }
            (ExperimentMode::Sweep, Some(sweep)) => {
                if sweep.values.is_empty() {
                    return Err(TwiError::param("sweep.values", "grid is empty"));
                }
                for &v in &sweep.values {
                    self.at_grid_point(v)?;
                }
            }
            (_, Some(_)) => {
                return Err(TwiError::param("sweep", "only valid with mode = \"sweep\""))
            }
            (_, None) => {
                if self.d_m <= 0.0 || !self.d_m.is_finite() {
                    return Err(TwiError::param("d_m", "must be > 0"));
                }
            }
        }
        Ok(())
    }

    /// Copy of the config with the swept parameter set to `value`.
    pub fn at_grid_point(&self, value: f64) -> Result<ExperimentConfig> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| TwiError::param("sweep", "no sweep grid"))?;
        let p = sweep.parameter;
        if !value.is_finite() || (p.is_integer() && (value.fract() != 0.0 || value < 0.0)) {
            return Err(TwiError::param(
                "sweep.values",
                format!("{value} is not valid for {}", p.column()),
            ));
        }
        let mut cfg = self.clone();
        cfg.sweep = None;
        cfg.mode = ExperimentMode::Sweep;
        let success_to_fail = |s: f64| -> Result<Interval> {
            if !(s > 0.0 && s <= 1.0) {
                return Err(TwiError::param(
                    "sweep.values",
                    format!("success {s} must lie in (0, 1]"),
                ));
            }
            Interval::point(1.0 - s)
        };
        match p {
            SweepParameter::PathCount => cfg.path_count = value as usize,
            SweepParameter::HMax => cfg.h_max = value as usize,
            SweepParameter::TfMs => cfg.tf_ms = FrameTime::new(value)?,
            SweepParameter::DM => cfg.d_m = value,
            SweepParameter::Epsilon => cfg.epsilon = ReliabilityBudget::new(value)?.epsilon(),
            SweepParameter::HopSuccess => {
                cfg.ranges.hop_fail = success_to_fail(value)?;
                if let Some(a) = sweep.max_attempts {
                    cfg.ranges.hop_max_attempts = IntRange::point(a)?;
                }
            }
            SweepParameter::SrPtSuccess => {
                let fail = success_to_fail(value)?;
                cfg.ranges.sr_fail = fail;
                cfg.ranges.pt_fail = fail;
                cfg.ranges.zeta_source = ZetaSource::Direct;
                if let Some(m) = sweep.max_attempts {
                    cfg.ranges.sr_max_attempts = IntRange::point(m)?;
                    cfg.ranges.pt_max_attempts = IntRange::point(m)?;
                }
            }
        }
        cfg.topology().validate()?;
        ReliabilityBudget::new(cfg.epsilon)?;
        Ok(cfg)
    }
}
