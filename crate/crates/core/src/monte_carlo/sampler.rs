use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::substream;
use crate::delay_components::{ComputationSpec, PropagationKind, PropagationSpec, RetrySpec};
use crate::error::{Result, TwiError};
use crate::path_model::PathSpec;
use crate::stage::{frame_ceil, FrameTime, StageDistribution};

/// Samples per parallel chunk in [`empirical_stage_pmf`]; part of the
/// reproducibility contract because each chunk owns one substream.
const CHUNK: usize = 1 << 16;

/// A single delay constituent to sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case", deny_unknown_fields)]
pub enum StageSpec {
    /// Continuous propagation delay (either geometry); no frame alignment.
    Propagation { propagation: PropagationSpec },
    /// Uniform computation delay.
    Computation { computation: ComputationSpec },
    /// Frame-aligned propagation plus sensing computation.
    N1 {
        propagation: PropagationSpec,
        computation: ComputationSpec,
        tf_ms: FrameTime,
    },
    /// Grant-free hop plus computation at the receiver.
    N2 {
        retry: RetrySpec,
        computation: ComputationSpec,
        tf_ms: FrameTime,
    },
    /// Truncated-geometric access stage (SR or PT).
    Geometric { retry: RetrySpec, tf_ms: FrameTime },
}

impl StageSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            StageSpec::Propagation { propagation } => propagation.validate(),
            StageSpec::Computation { computation } => computation.validate(),
            StageSpec::N1 {
                propagation,
                computation,
                ..
            } => {
                propagation.validate()?;
                computation.validate()
            }
            StageSpec::N2 {
                retry, computation, ..
            } => {
                retry.validate()?;
                computation.validate()
            }
            StageSpec::Geometric { retry, .. } => retry.validate(),
        }
    }

    pub fn frame(&self) -> Option<FrameTime> {
        match *self {
            StageSpec::N1 { tf_ms, .. }
            | StageSpec::N2 { tf_ms, .. }
            | StageSpec::Geometric { tf_ms, .. } => Some(tf_ms),
            _ => None,
        }
    }

    /// Analytical law of a frame-aligned stage.
    pub fn analytical_pmf(&self) -> Result<StageDistribution> {
        match self {
            StageSpec::N1 {
                propagation,
                computation,
                tf_ms,
            } => crate::delay_components::n1_pmf(propagation, computation, *tf_ms),
            StageSpec::N2 {
                retry,
                computation,
                tf_ms,
            } => crate::delay_components::n2_pmf(retry, computation, *tf_ms),
            StageSpec::Geometric { retry, tf_ms } => {
                crate::delay_components::truncated_geometric_pmf(retry, *tf_ms)
            }
            _ => Err(TwiError::param(
                "stage",
                "continuous stage has no frame PMF",
            )),
        }
    }
}

/// Uniform point in the disk of radius `radius`, as `(x, y)`.
pub fn sample_disk_point<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> (f64, f64) {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    (r * phi.cos(), r * phi.sin())
}

fn sample_propagation<R: Rng + ?Sized>(prop: &PropagationSpec, rng: &mut R) -> f64 {
    let d = prop.cell_radius_m;
    let distance = match prop.kind {
        PropagationKind::EventToBs => {
            let (x, y) = sample_disk_point(d, rng);
            x.hypot(y)
        }
        PropagationKind::EventToSensor => {
            let (x1, y1) = sample_disk_point(d, rng);
            let (x2, y2) = sample_disk_point(d, rng);
            (x1 - x2).hypot(y1 - y2)
        }
    };
    distance / prop.speed_m_per_ms
}

fn sample_computation<R: Rng + ?Sized>(c: &ComputationSpec, rng: &mut R) -> f64 {
    if c.is_degenerate() {
        c.c_min_ms
    } else {
        rng.random_range(c.c_min_ms..c.c_max_ms)
    }
}

/// Attempt index of the first success, or `None` once the limit is exhausted.
fn sample_attempts<R: Rng + ?Sized>(retry: &RetrySpec, rng: &mut R) -> Option<u32> {
    (1..=retry.max_attempts).find(|_| rng.random::<f64>() >= retry.fail_prob)
}

/// Attempts conditioned on success within the limit, by inverting the
/// truncated-geometric CDF `(1 - r^m) / (1 - r^M)`.
fn sample_attempts_conditioned<R: Rng + ?Sized>(retry: &RetrySpec, rng: &mut R) -> u32 {
    let r = retry.fail_prob;
    if r == 0.0 {
        return 1;
    }
    let m_max = retry.max_attempts;
    let u: f64 = rng.random();
    let target = u * (1.0 - r.powi(m_max as i32));
    // smallest m with 1 - r^m > target
    let m = ((1.0 - target).ln() / r.ln()).floor() as i64 + 1;
    m.clamp(1, m_max as i64) as u32
}

/// One frame count from a frame-aligned stage, conditioned on no drop.
pub fn sample_stage_frames<R: Rng + ?Sized>(spec: &StageSpec, rng: &mut R) -> Option<i64> {
    match spec {
        StageSpec::N1 {
            propagation,
            computation,
            tf_ms,
        } => {
            let z = sample_propagation(propagation, rng) + sample_computation(computation, rng);
            Some(frame_ceil(z / tf_ms.ms()))
        }
        StageSpec::N2 {
            retry,
            computation,
            tf_ms,
        } => {
            let a = sample_attempts_conditioned(retry, rng) as f64;
            let c = sample_computation(computation, rng);
            Some(frame_ceil(a + c / tf_ms.ms()))
        }
        StageSpec::Geometric { retry, .. } => Some(sample_attempts_conditioned(retry, rng) as i64),
        _ => None,
    }
}

/// One delay sample in ms; retry stages are conditioned on success.
pub fn sample_stage<R: Rng + ?Sized>(spec: &StageSpec, rng: &mut R) -> f64 {
    match spec {
        StageSpec::Propagation { propagation } => sample_propagation(propagation, rng),
        StageSpec::Computation { computation } => sample_computation(computation, rng),
        _ => {
            let tf = spec.frame().expect("frame-aligned stage").ms();
            sample_stage_frames(spec, rng).expect("frame-aligned stage") as f64 * tf
        }
    }
}

/// Histogram of `n_samples` draws as a [`StageDistribution`].
///
/// Chunk `i` of [`CHUNK`] samples uses substream `i` of `seed`.
pub fn empirical_stage_pmf(
    spec: &StageSpec,
    n_samples: usize,
    seed: u64,
) -> Result<StageDistribution> {
    spec.validate()?;
    if n_samples < 100_000 {
        return Err(TwiError::param(
            "n_samples",
            format!("need at least 1e5, got {n_samples}"),
        ));
    }
    let frame = spec
        .frame()
        .ok_or_else(|| TwiError::param("stage", "continuous stage has no frame PMF"))?;
    let chunks = n_samples.div_ceil(CHUNK);
    let counts: Vec<std::collections::BTreeMap<i64, u64>> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let len = CHUNK.min(n_samples - i * CHUNK);
            let mut hist = std::collections::BTreeMap::new();
            for _ in 0..len {
                let n = sample_stage_frames(spec, &mut rng).expect("frame-aligned stage");
                *hist.entry(n).or_insert(0u64) += 1;
            }
            hist
        })
        .collect();
    let mut total = std::collections::BTreeMap::new();
    for hist in counts {
        for (n, c) in hist {
            *total.entry(n).or_insert(0u64) += c;
        }
    }
    let n_min = *total.keys().next().expect("nonempty");
    let n_max = *total.keys().next_back().expect("nonempty");
    let masses = (n_min..=n_max)
        .map(|n| total.get(&n).copied().unwrap_or(0) as f64 / n_samples as f64)
        .collect();
    StageDistribution::from_masses(frame, n_min, masses)
}

/// End-to-end delay of one update along `path`, or `None` when some retry
/// stage exhausts its limit. Relayed delays are whole frames; direct sensing
/// keeps the continuous propagation delay.
pub fn sample_path_delay<R: Rng + ?Sized>(path: &PathSpec, rng: &mut R) -> Option<f64> {
    if path.is_direct() {
        return Some(sample_propagation(&path.propagation, rng));
    }
    let tf = path.frame.ms();
    let c1 = path.first_computation.as_ref()?;
    let z = sample_propagation(&path.propagation, rng) + sample_computation(c1, rng);
    let mut frames = frame_ceil(z / tf);
    for hop in &path.hops {
        let a = sample_attempts(&hop.retry, rng)? as f64;
        frames += frame_ceil(a + sample_computation(&hop.computation, rng) / tf);
    }
    frames += sample_attempts(path.sr.as_ref()?, rng)? as i64;
    frames += sample_attempts(path.pt.as_ref()?, rng)? as i64;
    Some(frames as f64 * tf)
}
