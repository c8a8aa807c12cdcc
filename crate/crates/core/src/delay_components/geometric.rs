use super::RetrySpec;
use crate::error::{Result, TwiError};
use crate::stage::{FrameTime, StageDistribution};

/// Law of `m * T_f` where `m` is the attempt on which a frame-slotted
/// transmission first succeeds, conditioned on success within the budget.
///
/// A zero failure probability collapses to the point mass at one attempt.
pub fn truncated_geometric_pmf(retry: &RetrySpec, frame: FrameTime) -> Result<StageDistribution> {
    retry.validate()?;
    let r = retry.fail_prob;
    if r == 0.0 {
        return Ok(StageDistribution::point_mass(frame, 1));
    }
    let norm = 1.0 - retry.exhaustion_prob();
    let masses = (1..=retry.max_attempts)
        .map(|m| r.powi(m as i32 - 1) * (1.0 - r) / norm)
        .collect();
    StageDistribution::from_masses(frame, 1, masses)
}

/// Closed-form `(mean ms, variance ms²)` of [`truncated_geometric_pmf`].
///
/// Uses `S1 = sum m r^(m-1)` and `S2 = sum m^2 r^(m-1) = r S1' + S1`.
pub fn truncated_geometric_moments(retry: &RetrySpec, frame: FrameTime) -> Result<(f64, f64)> {
    retry.validate()?;
    let r = retry.fail_prob;
    let big_m = retry.max_attempts as i32;
    let m = big_m as f64;
    let one_minus = 1.0 - r;
    let r_pow_m = r.powi(big_m);
    let numer = 1.0 - (m + 1.0) * r_pow_m + m * r_pow_m * r;
    let s1 = numer / (one_minus * one_minus);
    let s1_prime = -m * (m + 1.0) * r.powi(big_m - 1) / one_minus
        + 2.0 * numer / (one_minus * one_minus * one_minus);
    let s2 = r * s1_prime + s1;
    let scale = one_minus / (1.0 - r_pow_m);
    let mean_m = scale * s1;
    let var_m = (scale * s2 - mean_m * mean_m).max(0.0);
    let tf = frame.ms();
    Ok((mean_m * tf, var_m * tf * tf))
}

/// Per-frame scheduling-request miss probability for uplink SNR `gamma`:
/// `1 - (1 + gamma)^(-1/gamma)`.
pub fn zeta_from_snr(gamma: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(TwiError::param("snr", format!("must be > 0, got {gamma}")));
    }
    Ok(1.0 - (1.0 + gamma).powf(-1.0 / gamma))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tf(ms: f64) -> FrameTime {
        FrameTime::new(ms).unwrap()
    }

    #[test]
    fn certain_success_is_a_point_mass() {
        let d = truncated_geometric_pmf(&RetrySpec::new(0.0, 5).unwrap(), tf(10.0)).unwrap();
        assert_eq!(d.n_min(), 1);
        assert_eq!(d.masses(), &[1.0]);
        assert_eq!(d.mean(), 10.0);
    }

    #[test]
    fn renormalised_masses() {
        // raw geometric masses 0.5, 0.25 renormalised by 0.75
        let d = truncated_geometric_pmf(&RetrySpec::new(0.5, 2).unwrap(), tf(10.0)).unwrap();
        assert!((d.mass_at(1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.mass_at(2) - 1.0 / 3.0).abs() < 1e-15);
        assert!((d.mean() - 40.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_moments() {
        let (mean, var) =
            truncated_geometric_moments(&RetrySpec::new(0.5, 2).unwrap(), tf(10.0)).unwrap();
        assert!((mean - 40.0 / 3.0).abs() < 1e-12);
        assert!((var - 200.0 / 9.0).abs() < 1e-10);

        let (mean, _) =
            truncated_geometric_moments(&RetrySpec::new(1e-12, 7).unwrap(), tf(10.0)).unwrap();
        assert!((mean - 10.0).abs() < 1e-9);
    }

    #[test]
    fn closed_form_matches_direct_summation() {
        let retry = RetrySpec::new(0.9, 10).unwrap();
        let norm: f64 = 1.0 - 0.9f64.powi(10);
        let (mut e1, mut e2) = (0.0, 0.0);
        for m in 1..=10 {
            let p = 0.9f64.powi(m - 1) * 0.1 / norm;
            e1 += m as f64 * p;
            e2 += (m * m) as f64 * p;
        }
        let (mean, var) = truncated_geometric_moments(&retry, tf(10.0)).unwrap();
        assert!((mean - 10.0 * e1).abs() / mean < 1e-9);
        assert!((var - 100.0 * (e2 - e1 * e1)).abs() / var < 1e-9);
    }

    #[test]
    fn single_attempt_budget() {
        let (mean, var) =
            truncated_geometric_moments(&RetrySpec::new(0.4, 1).unwrap(), tf(4.0)).unwrap();
        assert!((mean - 4.0).abs() < 1e-12);
        assert!(var.abs() < 1e-12);
    }

    #[test]
    fn rejects_certain_failure() {
        assert!(RetrySpec::new(1.0, 3).is_err());
        assert!(RetrySpec::new(-0.1, 3).is_err());
        assert!(RetrySpec::new(0.2, 0).is_err());
        let bad = RetrySpec {
            fail_prob: 1.0,
            max_attempts: 3,
        };
        assert!(truncated_geometric_pmf(&bad, tf(1.0)).is_err());
    }

    #[test]
    fn snr_helper() {
        // gamma = 1 -> 1 - 2^-1
        assert!((zeta_from_snr(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(zeta_from_snr(10.0).unwrap() < zeta_from_snr(1.0).unwrap());
        assert!(zeta_from_snr(0.0).is_err());
    }
}
