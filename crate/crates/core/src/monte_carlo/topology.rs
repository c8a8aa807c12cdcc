use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::delay_components::{zeta_from_snr, ComputationSpec, RetrySpec};
use crate::error::{Result, TwiError};
use crate::path_model::{HopSpec, PathSpec};
use crate::stage::FrameTime;

/// Closed interval `[min, max]`, written as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if min.is_finite() && max.is_finite() && min <= max {
            Ok(Interval { min, max })
        } else {
            Err(TwiError::param(
                "interval",
                format!("need finite min <= max, got [{min}, {max}]"),
            ))
        }
    }

    pub fn point(value: f64) -> Result<Self> {
        Interval::new(value, value)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.min == self.max {
            self.min
        } else {
            rng.random_range(self.min..=self.max)
        }
    }

    fn check_within(&self, name: &'static str, lo: f64, hi_open: f64) -> Result<()> {
        if self.min < lo || self.max >= hi_open {
            return Err(TwiError::param(
                name,
                format!(
                    "range [{}, {}] must lie in [{lo}, {hi_open})",
                    self.min, self.max
                ),
            ));
        }
        Ok(())
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = TwiError;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> [f64; 2] {
        [i.min, i.max]
    }
}

/// Inclusive integer set `{min, ..., max}`, written as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[u32; 2]", into = "[u32; 2]")]
pub struct IntRange {
    pub min: u32,
    pub max: u32,
}

impl IntRange {
    pub fn new(min: u32, max: u32) -> Result<Self> {
        if min >= 1 && min <= max {
            Ok(IntRange { min, max })
        } else {
            Err(TwiError::param(
                "int_range",
                format!("need 1 <= min <= max, got [{min}, {max}]"),
            ))
        }
    }

    pub fn point(value: u32) -> Result<Self> {
        IntRange::new(value, value)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.random_range(self.min..=self.max)
    }
}

impl TryFrom<[u32; 2]> for IntRange {
    type Error = TwiError;

    fn try_from(v: [u32; 2]) -> Result<Self> {
        IntRange::new(v[0], v[1])
    }
}

impl From<IntRange> for [u32; 2] {
    fn from(r: IntRange) -> [u32; 2] {
        [r.min, r.max]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Light,
    Sound,
}

/// Signal speed and first-sensor computation range of one modality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModalitySpec {
    pub v_m_per_ms: f64,
    pub c1_ms: Interval,
}

/// How SR failure probabilities are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum ZetaSource {
    /// Directly from `ParameterRanges::sr_fail`.
    Direct,
    /// From a linear SNR drawn uniformly, mapped through `1 - (1 + g)^(-1/g)`.
    Snr { snr_linear: Interval },
}

/// Per-realization parameter ranges. Continuous values are drawn uniformly
/// over their interval and integer limits uniformly over their set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParameterRanges {
    pub light: ModalitySpec,
    pub sound: ModalitySpec,
    /// Probability that a path uses the light modality.
    pub light_fraction: f64,
    pub hop_fail: Interval,
    pub hop_max_attempts: IntRange,
    pub hop_computation_ms: Interval,
    pub sr_fail: Interval,
    pub sr_max_attempts: IntRange,
    pub zeta_source: ZetaSource,
    pub pt_fail: Interval,
    pub pt_max_attempts: IntRange,
}

impl Default for ParameterRanges {
    fn default() -> Self {
        let iv = |a, b| Interval { min: a, max: b };
        let ir = |a, b| IntRange { min: a, max: b };
        ParameterRanges {
            light: ModalitySpec {
                v_m_per_ms: 3e5,
                c1_ms: iv(10.0, 200.0),
            },
            sound: ModalitySpec {
                v_m_per_ms: 0.3,
                c1_ms: iv(0.0, 10.0),
            },
            light_fraction: 0.5,
            hop_fail: iv(0.05, 0.15),
            hop_max_attempts: ir(2, 5),
            hop_computation_ms: iv(0.0, 10.0),
            sr_fail: iv(0.05, 0.10),
            sr_max_attempts: ir(2, 5),
            zeta_source: ZetaSource::Direct,
            pt_fail: iv(0.01, 0.10),
            pt_max_attempts: ir(3, 7),
        }
    }
}

impl ParameterRanges {
    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("light", &self.light), ("sound", &self.sound)] {
            if !(m.v_m_per_ms.is_finite() && m.v_m_per_ms > 0.0) {
                return Err(TwiError::param(
                    "v_m_per_ms",
                    format!("{name} speed must be > 0"),
                ));
            }
            m.c1_ms.check_within("c1_ms", 0.0, f64::INFINITY)?;
        }
        if !(0.0..=1.0).contains(&self.light_fraction) {
            return Err(TwiError::param("light_fraction", "must lie in [0, 1]"));
        }
        self.hop_fail.check_within("hop_fail", 0.0, 1.0)?;
        self.hop_computation_ms
            .check_within("hop_computation_ms", 0.0, f64::INFINITY)?;
        self.sr_fail.check_within("sr_fail", 0.0, 1.0)?;
        self.pt_fail.check_within("pt_fail", 0.0, 1.0)?;
        if let ZetaSource::Snr { snr_linear } = &self.zeta_source {
            if !(snr_linear.min > 0.0) {
                return Err(TwiError::param("snr_linear", "SNR must be > 0"));
            }
        }
        Ok(())
    }

    pub fn modality(&self, m: Modality) -> &ModalitySpec {
        match m {
            Modality::Light => &self.light,
            Modality::Sound => &self.sound,
        }
    }

    fn draw_retry<R: Rng + ?Sized>(
        fail: &Interval,
        attempts: &IntRange,
        rng: &mut R,
    ) -> Result<RetrySpec> {
        let r = fail.sample(rng);
        RetrySpec::new(r, attempts.sample(rng))
    }

    fn draw_sr<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RetrySpec> {
        match &self.zeta_source {
            ZetaSource::Direct => Self::draw_retry(&self.sr_fail, &self.sr_max_attempts, rng),
            ZetaSource::Snr { snr_linear } => {
                let zeta = zeta_from_snr(snr_linear.sample(rng))?;
                RetrySpec::new(zeta, self.sr_max_attempts.sample(rng))
            }
        }
    }

    /// Draws one path with `sensors` sensors (zero for direct sensing).
    #[allow(clippy::too_many_arguments)]
    pub fn draw_path<R: Rng + ?Sized>(
        &self,
        path_id: String,
        sensors: usize,
        modality: Modality,
        cell_radius_m: f64,
        frame: FrameTime,
        rng: &mut R,
    ) -> Result<PathSpec> {
        let m = self.modality(modality);
        if sensors == 0 {
            return PathSpec::direct(path_id, cell_radius_m, m.v_m_per_ms, frame);
        }
        let first = ComputationSpec::new(m.c1_ms.min, m.c1_ms.max)?;
        let mut hops = Vec::with_capacity(sensors - 1);
        for _ in 1..sensors {
            let retry = Self::draw_retry(&self.hop_fail, &self.hop_max_attempts, rng)?;
            let c = self.hop_computation_ms;
            hops.push(HopSpec {
                retry,
                computation: ComputationSpec::new(c.min, c.max)?,
            });
        }
        let sr = self.draw_sr(rng)?;
        let pt = Self::draw_retry(&self.pt_fail, &self.pt_max_attempts, rng)?;
        PathSpec::relayed(
            path_id,
            cell_radius_m,
            m.v_m_per_ms,
            first,
            hops,
            sr,
            pt,
            frame,
        )
    }
}

/// Mechanism enforcing at most one direct path per realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectPathPolicy {
    /// Redraw the whole sensor-count vector until it has at most one zero.
    #[default]
    RejectJoint,
    /// Keep the first zero and redraw later zeros from `{1..H_max}`.
    ResampleExtra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    pub path_count: usize,
    pub h_max: usize,
    pub d_m: f64,
    pub tf_ms: FrameTime,
    #[serde(default)]
    pub direct_policy: DirectPathPolicy,
}

impl TopologySpec {
    pub fn validate(&self) -> Result<()> {
        if self.path_count == 0 {
            return Err(TwiError::param("path_count", "must be >= 1"));
        }
        if self.h_max == 0 && self.path_count > 1 {
            return Err(TwiError::param(
                "h_max",
                "h_max = 0 admits only direct paths, so at most one path",
            ));
        }
        if !(self.d_m.is_finite() && self.d_m > 0.0) {
            return Err(TwiError::param("d_m", "must be > 0"));
        }
        Ok(())
    }

    /// Sensor counts `h_k`, uniform on `{0..H_max}` with at most one zero.
    pub fn draw_sensor_counts<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let draw = |rng: &mut R| rng.random_range(0..=self.h_max);
        match self.direct_policy {
            DirectPathPolicy::RejectJoint => loop {
                let h: Vec<usize> = (0..self.path_count).map(|_| draw(rng)).collect();
                if h.iter().filter(|&&x| x == 0).count() <= 1 {
                    return h;
                }
            },
            DirectPathPolicy::ResampleExtra => {
                let mut seen_direct = false;
                (0..self.path_count)
                    .map(|_| {
                        let mut h = draw(rng);
                        if h == 0 {
                            if seen_direct {
                                h = rng.random_range(1..=self.h_max);
                            }
                            seen_direct = true;
                        }
                        h
                    })
                    .collect()
            }
        }
    }
}

/// One random realization of `topo.path_count` paths.
///
/// Draw order: sensor counts, then for each path its modality followed by
/// its link parameters.
pub fn random_topology<R: Rng + ?Sized>(
    topo: &TopologySpec,
    ranges: &ParameterRanges,
    rng: &mut R,
) -> Result<Vec<PathSpec>> {
    topo.validate()?;
    ranges.validate()?;
    let counts = topo.draw_sensor_counts(rng);
    counts
        .into_iter()
        .enumerate()
        .map(|(k, h)| {
            let modality = if rng.random::<f64>() < ranges.light_fraction {
                Modality::Light
            } else {
                Modality::Sound
            };
            ranges.draw_path(
                format!("path-{}", k + 1),
                h,
                modality,
                topo.d_m,
                topo.tf_ms,
                rng,
            )
        })
        .collect()
}
