use std::f64::consts::PI;

use super::{ComputationSpec, PropagationKind, PropagationSpec};
use crate::error::Result;
use crate::stage::{frame_ceil, FrameTime, StageDistribution};

/// CDF of the event-to-sensor distance normalised by the cell diameter,
/// `s = R / 2D` on `[0, 1]`.
pub fn event_sensor_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let root = (1.0 - s * s).sqrt();
    2.0 / PI * (4.0 * s * s * s.acos() + s.asin() - s * (1.0 + 2.0 * s * s) * root)
}

/// `int_0^u F(s) ds` for the normalised event-to-sensor CDF, `u` in `[0, 1]`.
fn event_sensor_cdf_integral(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    let root = (1.0 - u * u).sqrt();
    let u2 = u * u;
    2.0 * (-18.0 * u2 * u2 * root + 60.0 * u2 * u * u.acos() - 29.0 * u2 * root
        + 45.0 * u * u.asin()
        + 32.0 * root
        - 32.0)
        / (45.0 * PI)
}

/// `int_0^x F_prop(t) dt` in ms.
fn integrated_cdf(prop: &PropagationSpec, x: f64) -> f64 {
    let span = prop.support_max_ms();
    if x <= 0.0 {
        return 0.0;
    }
    if span == 0.0 {
        return x;
    }
    let unit = |u: f64| match prop.kind {
        PropagationKind::EventToBs => u * u * u / 3.0,
        PropagationKind::EventToSensor => event_sensor_cdf_integral(u),
    };
    if x >= span {
        span * unit(1.0) + (x - span)
    } else {
        span * unit(x / span)
    }
}

/// CDF of `Z = T_prop + C` at `z` ms.
fn sum_cdf(prop: &PropagationSpec, comp: &ComputationSpec, z: f64) -> f64 {
    let prop_cdf = |t: f64| {
        if prop.support_max_ms() == 0.0 {
            if t >= 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            prop.cdf(t)
        }
    };
    let value = if comp.is_degenerate() {
        prop_cdf(z - comp.c_min_ms)
    } else {
        (integrated_cdf(prop, z - comp.c_min_ms) - integrated_cdf(prop, z - comp.c_max_ms))
            / comp.width()
    };
    value.clamp(0.0, 1.0)
}

/// Law of `T_1 = T_f * ceil((T_prop + C_1) / T_f)`.
///
/// Bin `n` holds `P(Z in ((n-1) T_f, n T_f])`, evaluated from the closed-form
/// propagation CDF and its antiderivative. The stored support is exactly
/// `ceil(C_min/T_f) ..= ceil((span + C_max)/T_f)`, where `span` is the
/// largest propagation delay; edge bins may carry zero mass.
pub fn n1_pmf(
    prop: &PropagationSpec,
    comp: &ComputationSpec,
    frame: FrameTime,
) -> Result<StageDistribution> {
    prop.validate()?;
    comp.validate()?;
    let tf = frame.ms();
    let span = prop.support_max_ms();
    if span == 0.0 && comp.is_degenerate() {
        return Ok(StageDistribution::point_mass(
            frame,
            frame_ceil(comp.c_min_ms / tf),
        ));
    }
    let n_lo = frame_ceil(comp.c_min_ms / tf);
    let n_hi = frame_ceil((span + comp.c_max_ms) / tf);
    let mut prev = sum_cdf(prop, comp, (n_lo - 1) as f64 * tf);
    let masses = (n_lo..=n_hi)
        .map(|n| {
            let cur = sum_cdf(prop, comp, n as f64 * tf);
            let mass = cur - prev;
            prev = cur;
            mass
        })
        .collect();
    StageDistribution::from_masses(frame, n_lo, masses)
}
