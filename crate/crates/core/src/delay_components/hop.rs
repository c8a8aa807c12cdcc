use super::{ComputationSpec, RetrySpec};
use crate::error::Result;
use crate::stage::{frame_ceil, FrameTime, StageDistribution};

/// Law of `T_2 = T_f * ceil(a + C / T_f)` for a grant-free hop with
/// truncated-geometric attempt count `a` and uniform computation `C`.
///
/// Conditional on `a`, bin `n` receives the fraction of `[C_min, C_max]`
/// falling in `(T_f (n-1-a), T_f (n-a)]`. A constant computation time turns
/// this into the indicator of `n = ceil(a + c/T_f)`.
pub fn n2_pmf(
    hop: &RetrySpec,
    comp: &ComputationSpec,
    frame: FrameTime,
) -> Result<StageDistribution> {
    hop.validate()?;
    comp.validate()?;
    let tf = frame.ms();
    let attempts = super::truncated_geometric_pmf(hop, frame)?;
    let (lo_off, hi_off) = (comp.c_min_ms / tf, comp.c_max_ms / tf);
    let n_lo = frame_ceil(attempts.n_min() as f64 + lo_off);
    let n_hi = frame_ceil(attempts.n_max() as f64 + hi_off);
    let mut masses = vec![0.0; (n_hi - n_lo + 1) as usize];

    for (a, _, pa) in attempts.iter() {
        if pa == 0.0 {
            continue;
        }
        let af = a as f64;
        if comp.is_degenerate() {
            let n = frame_ceil(af + lo_off);
            masses[(n - n_lo) as usize] += pa;
            continue;
        }
        for n in frame_ceil(af + lo_off)..=frame_ceil(af + hi_off) {
            let upper = comp.c_max_ms.min(tf * (n as f64 - af));
            let lower = comp.c_min_ms.max(tf * (n as f64 - 1.0 - af));
            let overlap = (upper - lower).max(0.0);
            masses[(n - n_lo) as usize] += pa * overlap / comp.width();
        }
    }
    StageDistribution::from_masses(frame, n_lo, masses)
}
