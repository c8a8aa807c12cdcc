//! PMFs and first two moments of every elementary delay constituent.
//!
//! All times are in milliseconds and speeds in metres per millisecond.

mod event_sensor;
mod geometric;
mod hop;
mod propagation;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TwiError};

pub use event_sensor::{event_sensor_cdf, n1_pmf};
pub use geometric::{truncated_geometric_moments, truncated_geometric_pmf, zeta_from_snr};
pub use hop::n2_pmf;
pub use propagation::event_propagation_moments;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagationKind {
    /// Event sensed directly by the base station at the cell centre.
    EventToBs,
    /// Event sensed by a sensor placed uniformly in the cell.
    EventToSensor,
}

/// Physical-signal propagation from a uniformly placed event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSpec {
    #[serde(rename = "d_m")]
    pub cell_radius_m: f64,
    #[serde(rename = "v_m_per_ms")]
    pub speed_m_per_ms: f64,
    pub kind: PropagationKind,
}

impl PropagationSpec {
    pub fn new(cell_radius_m: f64, speed_m_per_ms: f64, kind: PropagationKind) -> Result<Self> {
        let spec = PropagationSpec {
            cell_radius_m,
            speed_m_per_ms,
            kind,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cell_radius_m.is_finite() && self.cell_radius_m > 0.0) {
            return Err(TwiError::param(
                "d_m",
                format!("must be > 0, got {}", self.cell_radius_m),
            ));
        }
        if !(self.speed_m_per_ms > 0.0) || self.speed_m_per_ms.is_nan() {
            return Err(TwiError::param(
                "v_m_per_ms",
                format!("must be > 0, got {}", self.speed_m_per_ms),
            ));
        }
        Ok(())
    }

    /// Largest propagation delay: `D/v` towards the BS, `2D/v` towards a sensor.
    pub fn support_max_ms(&self) -> f64 {
        let reach = match self.kind {
            PropagationKind::EventToBs => self.cell_radius_m,
            PropagationKind::EventToSensor => 2.0 * self.cell_radius_m,
        };
        reach / self.speed_m_per_ms
    }

    /// Delay density at `t` ms.
    pub fn density(&self, t: f64) -> f64 {
        let (d, v) = (self.cell_radius_m, self.speed_m_per_ms);
        if t < 0.0 || t > self.support_max_ms() {
            return 0.0;
        }
        match self.kind {
            PropagationKind::EventToBs => 2.0 * v * v * t / (d * d),
            PropagationKind::EventToSensor => {
                let x = (v * t / (2.0 * d)).min(1.0);
                4.0 * v * v * t / (std::f64::consts::PI * d * d)
                    * (x.acos() - x * (1.0 - x * x).sqrt())
            }
        }
    }

    /// Delay CDF at `t` ms.
    pub fn cdf(&self, t: f64) -> f64 {
        let span = self.support_max_ms();
        if t <= 0.0 {
            return 0.0;
        }
        if t >= span {
            return 1.0;
        }
        let s = t / span;
        match self.kind {
            PropagationKind::EventToBs => s * s,
            PropagationKind::EventToSensor => event_sensor_cdf(s),
        }
    }
}

/// Computation delay `C ~ U[c_min, c_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputationSpec {
    pub c_min_ms: f64,
    pub c_max_ms: f64,
}

impl ComputationSpec {
    pub fn new(c_min_ms: f64, c_max_ms: f64) -> Result<Self> {
        let spec = ComputationSpec { c_min_ms, c_max_ms };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_min_ms.is_finite() && self.c_max_ms.is_finite()) {
            return Err(TwiError::param("c_min_ms/c_max_ms", "must be finite"));
        }
        if self.c_min_ms < 0.0 || self.c_min_ms > self.c_max_ms {
            return Err(TwiError::param(
                "c_min_ms/c_max_ms",
                format!(
                    "need 0 <= c_min <= c_max, got [{}, {}]",
                    self.c_min_ms, self.c_max_ms
                ),
            ));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.c_max_ms - self.c_min_ms
    }

    pub fn is_degenerate(&self) -> bool {
        self.width() == 0.0
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.c_min_ms + self.c_max_ms)
    }

    pub fn variance(&self) -> f64 {
        self.width() * self.width() / 12.0
    }
}

/// Per-frame failure probability and retry limit of a truncated-geometric stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrySpec {
    pub fail_prob: f64,
    pub max_attempts: u32,
}

impl RetrySpec {
    pub fn new(fail_prob: f64, max_attempts: u32) -> Result<Self> {
        let spec = RetrySpec {
            fail_prob,
            max_attempts,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.fail_prob) {
            return Err(TwiError::param(
                "fail_prob",
                format!("must lie in [0, 1), got {}", self.fail_prob),
            ));
        }
        if self.max_attempts == 0 {
            return Err(TwiError::param("max_attempts", "must be >= 1"));
        }
        Ok(())
    }

    /// Probability that every attempt within the budget fails.
    pub fn exhaustion_prob(&self) -> f64 {
        self.fail_prob.powi(self.max_attempts as i32)
    }
}
