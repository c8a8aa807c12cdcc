use std::f64::consts::PI;

use super::{PropagationKind, PropagationSpec};
use crate::error::Result;
use crate::quadrature::adaptive_simpson;

/// `(mean ms, variance ms²)` of the event propagation delay.
///
/// The event-to-BS law has closed moments. The event-to-sensor moments are
/// integrated numerically from the density over the normalised support.
pub fn event_propagation_moments(prop: &PropagationSpec) -> Result<(f64, f64)> {
    prop.validate()?;
    let (d, v) = (prop.cell_radius_m, prop.speed_m_per_ms);
    match prop.kind {
        PropagationKind::EventToBs => Ok((2.0 * d / (3.0 * v), d * d / (18.0 * v * v))),
        PropagationKind::EventToSensor => {
            let span = prop.support_max_ms();
            // density of s = t / span on [0, 1]
            let g = |s: f64| {
                let s = s.clamp(0.0, 1.0);
                16.0 * s / PI * (s.acos() - s * (1.0 - s * s).sqrt())
            };
            let e1 = adaptive_simpson(|s| s * g(s), 0.0, 1.0, 1e-14);
            let e2 = adaptive_simpson(|s| s * s * g(s), 0.0, 1.0, 1e-14);
            Ok((span * e1, span * span * (e2 - e1 * e1)))
        }
    }
}
