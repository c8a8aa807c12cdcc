//! Frame-aligned discrete delay distributions.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TwiError};

/// Slack used when snapping a frame ratio to an integer before `ceil`.
///
/// `0.3 / 0.1` evaluates to `2.9999999999999996` and `0.1 * 3.0 / 0.1` to
/// `3.0000000000000004`; both must land in bin 3.
const CEIL_SNAP: f64 = 1e-9;

/// Total-mass slack accepted from numerical constructions before the masses
/// are renormalised.
const MASS_SLACK: f64 = 1e-8;

/// Frame duration in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FrameTime(f64);

impl FrameTime {
    pub fn new(ms: f64) -> Result<Self> {
        if ms.is_finite() && ms > 0.0 {
            Ok(FrameTime(ms))
        } else {
            Err(TwiError::param(
                "tf_ms",
                format!("frame duration must be > 0, got {ms}"),
            ))
        }
    }

    pub fn ms(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FrameTime {
    type Error = TwiError;

    fn try_from(ms: f64) -> Result<Self> {
        FrameTime::new(ms)
    }
}

impl From<FrameTime> for f64 {
    fn from(frame: FrameTime) -> f64 {
        frame.0
    }
}

/// `ceil(x)` with values within [`CEIL_SNAP`] of an integer snapped onto it.
pub fn frame_ceil(x: f64) -> i64 {
    let nearest = x.round();
    if (x - nearest).abs() <= CEIL_SNAP * nearest.abs().max(1.0) {
        nearest as i64
    } else {
        x.ceil() as i64
    }
}

/// A finite PMF over consecutive frame counts `n_min, n_min + 1, ...`; the
/// delay of bin `n` is `n * T_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct StageDistribution {
    frame: FrameTime,
    n_min: i64,
    masses: Vec<f64>,
    mean_ms: f64,
    variance_ms2: f64,
}

impl StageDistribution {
    /// Builds a distribution from raw masses.
    ///
    /// Masses may carry round-off: tiny negatives (above `-1e-12`) are
    /// clamped to zero and a total within `1e-8` of one is renormalised.
    pub fn from_masses(frame: FrameTime, n_min: i64, masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(TwiError::Numerical("empty support".into()));
        }
        let mut masses = masses;
        for m in masses.iter_mut() {
            if !m.is_finite() || *m < -1e-12 {
                return Err(TwiError::Numerical(format!("invalid probability mass {m}")));
            }
            if *m < 0.0 {
                *m = 0.0;
            }
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_SLACK {
            return Err(TwiError::Numerical(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        for m in masses.iter_mut() {
            *m /= total;
        }
        let (mean_ms, variance_ms2) = moments_of(frame, n_min, &masses);
        Ok(StageDistribution {
            frame,
            n_min,
            masses,
            mean_ms,
            variance_ms2,
        })
    }

    pub fn point_mass(frame: FrameTime, n: i64) -> Self {
        StageDistribution {
            frame,
            n_min: n,
            masses: vec![1.0],
            mean_ms: n as f64 * frame.ms(),
            variance_ms2: 0.0,
        }
    }

    pub fn frame(&self) -> FrameTime {
        self.frame
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.masses.len() as i64 - 1
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass_at(&self, n: i64) -> f64 {
        if n < self.n_min {
            return 0.0;
        }
        self.masses
            .get((n - self.n_min) as usize)
            .copied()
            .unwrap_or(0.0)
    }

    /// Mean delay in milliseconds.
    pub fn mean(&self) -> f64 {
        self.mean_ms
    }

    /// Delay variance in ms².
    pub fn variance(&self) -> f64 {
        self.variance_ms2
    }

    /// Iterates `(n, delay_ms, mass)` over the stored support.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        let tf = self.frame.ms();
        self.masses.iter().enumerate().map(move |(i, &m)| {
            let n = self.n_min + i as i64;
            (n, n as f64 * tf, m)
        })
    }

    /// `P(T <= t_ms)`.
    pub fn cdf(&self, t_ms: f64) -> f64 {
        let tf = self.frame.ms();
        self.iter()
            .take_while(|&(n, _, _)| n as f64 * tf <= t_ms + CEIL_SNAP * tf)
            .map(|(_, _, m)| m)
            .sum::<f64>()
            .min(1.0)
    }

    /// Law of the sum of two independent stages.
    pub fn convolve(&self, other: &StageDistribution) -> Result<StageDistribution> {
        let (a, b) = (self.frame.ms(), other.frame.ms());
        if (a - b).abs() > 1e-12 * a.max(b) {
            return Err(TwiError::FrameMismatch { left: a, right: b });
        }
        let mut out = vec![0.0; self.masses.len() + other.masses.len() - 1];
        for (i, &p) in self.masses.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (j, &q) in other.masses.iter().enumerate() {
                out[i + j] += p * q;
            }
        }
        StageDistribution::from_masses(self.frame, self.n_min + other.n_min, out)
    }

    /// Total-variation distance `0.5 * sum |p - q|` over the union of supports.
    pub fn total_variation(&self, other: &StageDistribution) -> f64 {
        let lo = self.n_min.min(other.n_min);
        let hi = self.n_max().max(other.n_max());
        0.5 * (lo..=hi)
            .map(|n| (self.mass_at(n) - other.mass_at(n)).abs())
            .sum::<f64>()
    }
}

fn moments_of(frame: FrameTime, n_min: i64, masses: &[f64]) -> (f64, f64) {
    // Centre on n_min so that large offsets do not cost precision.
    let (mut s1, mut s2) = (0.0, 0.0);
    for (i, &m) in masses.iter().enumerate() {
        let k = i as f64;
        s1 += k * m;
        s2 += k * k * m;
    }
    let tf = frame.ms();
    let mean = (n_min as f64 + s1) * tf;
    let var = (s2 - s1 * s1).max(0.0) * tf * tf;
    (mean, var)
}
