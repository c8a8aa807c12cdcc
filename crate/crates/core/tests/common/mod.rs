//! Strategies, invariant checks and independent oracles shared by the
//! property suite and the acceptance harness.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use twi_core::path_model::summarize_path_moments;
use twi_core::quadrature::adaptive_simpson_with_breaks;
use twi_core::stage::frame_ceil;
use twi_core::{
    cantelli_theta, drop_probability, feasibility_phi, n1_pmf, n2_pmf, solve_min_twi,
    solve_uniform_baseline, truncated_geometric_moments, truncated_geometric_pmf, ComputationSpec,
    FrameTime, HopSpec, PathSpec, PathSummary, PropagationKind, PropagationSpec, ReliabilityBudget,
    RetrySpec, StageDistribution, ALPHA_MIN,
};

pub const TOL_MS: f64 = 1e-3;

// ---------------------------------------------------------------- strategies

pub fn frame() -> impl Strategy<Value = FrameTime> {
    (1.0f64..25.0).prop_map(|t| FrameTime::new(t).unwrap())
}

pub fn retry() -> impl Strategy<Value = RetrySpec> {
    (0.0f64..0.95, 1u32..30).prop_map(|(r, m)| RetrySpec::new(r, m).unwrap())
}

pub fn computation() -> impl Strategy<Value = ComputationSpec> {
    (0.0f64..200.0, 0.0f64..300.0, any::<bool>()).prop_map(|(lo, w, point)| {
        let hi = if point { lo } else { lo + w };
        ComputationSpec::new(lo, hi).unwrap()
    })
}

pub fn event_to_sensor() -> impl Strategy<Value = PropagationSpec> {
    (
        10.0f64..300.0,
        prop_oneof![Just(3e5), Just(0.3), 0.2f64..5.0],
    )
        .prop_map(|(d, v)| PropagationSpec::new(d, v, PropagationKind::EventToSensor).unwrap())
}

pub fn relayed_path() -> impl Strategy<Value = PathSpec> {
    (
        event_to_sensor(),
        computation(),
        prop::collection::vec((retry(), computation()), 0..4),
        retry(),
        retry(),
        frame(),
    )
        .prop_map(|(prop, c1, hops, sr, pt, tf)| {
            let hops = hops
                .into_iter()
                .map(|(retry, computation)| HopSpec { retry, computation })
                .collect();
            PathSpec::relayed(
                "p",
                prop.cell_radius_m,
                prop.speed_m_per_ms,
                c1,
                hops,
                sr,
                pt,
                tf,
            )
            .unwrap()
        })
}

pub fn summary(max_drop: f64) -> impl Strategy<Value = PathSummary> {
    (0.0f64..2000.0, 0.0f64..300.0, 0.0f64..max_drop.max(1e-12))
        .prop_map(|(m, s, p)| PathSummary::from_moments(m, s * s, p).unwrap())
}

pub fn instance() -> impl Strategy<Value = (Vec<PathSummary>, ReliabilityBudget)> {
    (prop::collection::vec(summary(0.05), 1..6), 0.01f64..0.5)
        .prop_map(|(s, e)| (s, ReliabilityBudget::new(e).unwrap()))
}

pub fn zero_drop_instance() -> impl Strategy<Value = (Vec<PathSummary>, ReliabilityBudget)> {
    (
        prop::collection::vec((0.0f64..1000.0, 1.0f64..200.0), 2..4),
        0.02f64..0.2,
    )
        .prop_map(|(v, e)| {
            let s = v
                .into_iter()
                .map(|(m, sd)| PathSummary::from_moments(m, sd * sd, 0.0).unwrap())
                .collect();
            (s, ReliabilityBudget::new(e).unwrap())
        })
}

// ---------------------------------------------------------------- oracles

/// `P(N_1 = n)` by integrating the propagation density against the length of
/// the computation interval that lands the total in frame `n`.
pub fn n1_mass_by_quadrature(
    prop: &PropagationSpec,
    comp: &ComputationSpec,
    tf: f64,
    n: i64,
) -> f64 {
    let (lo, hi) = (comp.c_min_ms, comp.c_max_ms);
    let w = hi - lo;
    let a = (n - 1) as f64 * tf;
    let b = n as f64 * tf;
    let tmax = prop.support_max_ms();
    let overlap = |t: f64| ((b - t).min(hi) - (a - t).max(lo)).max(0.0) / w;
    let breaks = [a - hi, a - lo, b - hi, b - lo];
    adaptive_simpson_with_breaks(|t| prop.density(t) * overlap(t), 0.0, tmax, &breaks, 1e-13)
}

/// Cantelli requirement of one path charged budget `e`.
fn required_twi(s: &PathSummary, e: f64) -> f64 {
    let alpha = (1.0 - e).max(ALPHA_MIN);
    if alpha >= 1.0 {
        if s.variance_ms2 == 0.0 {
            s.mean_ms
        } else {
            f64::INFINITY
        }
    } else {
        s.mean_ms + s.std_dev() * cantelli_theta(alpha).unwrap()
    }
}

/// Minimum of a convex function on `[lo, hi]` by repeatedly zooming a
/// uniform grid onto the neighbourhood of its best point.
fn zoom_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const POINTS: usize = 100;
    let mut best = f64::INFINITY;
    let mut arg = lo;
    while hi - lo > 1e-13 {
        let h = (hi - lo) / POINTS as f64;
        for i in 0..=POINTS {
            let x = lo + i as f64 * h;
            let v = f(x);
            if v < best {
                best = v;
                arg = x;
            }
        }
        lo = (arg - 2.0 * h).max(lo);
        hi = (arg + 2.0 * h).min(hi);
    }
    best
}

/// Minimal TWI for zero-drop paths by exhaustive grid search over budget
/// splits. The first path's share is searched on a zoomed grid; the rest of
/// the budget is split recursively, which keeps every level convex.
pub fn grid_min_twi(summaries: &[PathSummary], epsilon: f64) -> f64 {
    match summaries {
        [only] => required_twi(only, epsilon),
        [first, rest @ ..] => zoom_min(
            &|e| required_twi(first, e).max(grid_min_twi(rest, epsilon - e)),
            0.0,
            epsilon,
        ),
        [] => unreachable!(),
    }
}

// ---------------------------------------------------------------- invariants

pub fn check_normalised(d: &StageDistribution) -> Result<(), TestCaseError> {
    let total: f64 = d.masses().iter().sum();
    prop_assert!((total - 1.0).abs() < 1e-9, "mass {}", total);
    prop_assert!(d.masses().iter().all(|&m| m >= 0.0));
    Ok(())
}

pub fn check_stage_pmfs(
    prop: PropagationSpec,
    c: ComputationSpec,
    r: RetrySpec,
    tf: FrameTime,
) -> Result<(), TestCaseError> {
    for d in [
        n1_pmf(&prop, &c, tf).unwrap(),
        n2_pmf(&r, &c, tf).unwrap(),
        truncated_geometric_pmf(&r, tf).unwrap(),
    ] {
        check_normalised(&d)?;
    }
    Ok(())
}

/// Closed-form truncated-geometric moments against direct summation.
pub fn check_geometric_moments(r: RetrySpec, tf: FrameTime) -> Result<(), TestCaseError> {
    let (mean, var) = truncated_geometric_moments(&r, tf).unwrap();
    let t = tf.ms();
    let m = r.max_attempts;
    let norm: f64 = (1..=m).map(|k| r.fail_prob.powi(k as i32 - 1)).sum();
    let s1: f64 = (1..=m)
        .map(|k| k as f64 * r.fail_prob.powi(k as i32 - 1))
        .sum::<f64>()
        / norm;
    let s2: f64 = (1..=m)
        .map(|k| (k * k) as f64 * r.fail_prob.powi(k as i32 - 1))
        .sum::<f64>()
        / norm;
    prop_assert!(
        (mean - t * s1).abs() <= 1e-9 * (1.0 + mean),
        "{} vs {}",
        mean,
        t * s1
    );
    let v = t * t * (s2 - s1 * s1);
    prop_assert!((var - v).abs() <= 1e-7 * (1.0 + var), "{} vs {}", var, v);
    Ok(())
}

pub fn check_support_bounds(
    prop: PropagationSpec,
    c: ComputationSpec,
    r: RetrySpec,
    tf: FrameTime,
) -> Result<(), TestCaseError> {
    let t = tf.ms();
    let n1 = n1_pmf(&prop, &c, tf).unwrap();
    let lo = frame_ceil(c.c_min_ms / t);
    let hi = frame_ceil((prop.support_max_ms() + c.c_max_ms) / t);
    prop_assert!(
        n1.n_min() >= lo && n1.n_max() <= hi,
        "N1 [{}, {}] outside [{}, {}]",
        n1.n_min(),
        n1.n_max(),
        lo,
        hi
    );
    let n2 = n2_pmf(&r, &c, tf).unwrap();
    let lo2 = 1 + frame_ceil(c.c_min_ms / t);
    let hi2 = r.max_attempts as i64 + frame_ceil(c.c_max_ms / t);
    prop_assert!(
        n2.n_min() >= lo2 && n2.n_max() <= hi2,
        "N2 [{}, {}] outside [{}, {}]",
        n2.n_min(),
        n2.n_max(),
        lo2,
        hi2
    );
    let g = truncated_geometric_pmf(&r, tf).unwrap();
    prop_assert!(g.n_min() >= 1 && g.n_max() <= r.max_attempts as i64);
    Ok(())
}

/// Drop probability rises with failure probability, falls with the retry
/// limit and never decreases when a hop is appended.
pub fn check_drop_monotone(path: PathSpec, bump: f64) -> Result<(), TestCaseError> {
    let base = drop_probability(&path).unwrap();
    prop_assert!((0.0..1.0).contains(&base));

    let mut worse = path.clone();
    let pt = worse.pt.unwrap();
    worse.pt = Some(RetrySpec::new((pt.fail_prob + bump).min(0.99), pt.max_attempts).unwrap());
    prop_assert!(drop_probability(&worse).unwrap() >= base - 1e-15);

    let mut more = path.clone();
    let sr = more.sr.unwrap();
    more.sr = Some(RetrySpec::new(sr.fail_prob, sr.max_attempts + 1).unwrap());
    prop_assert!(drop_probability(&more).unwrap() <= base + 1e-15);

    let mut longer = path.clone();
    longer.hops.push(HopSpec {
        retry: RetrySpec::new(0.3, 3).unwrap(),
        computation: ComputationSpec::new(0.0, 10.0).unwrap(),
    });
    longer.hop_count += 1;
    prop_assert!(drop_probability(&longer).unwrap() >= base - 1e-15);
    Ok(())
}

pub fn check_phi_monotone(
    summaries: &[PathSummary],
    mut points: Vec<f64>,
) -> Result<(), TestCaseError> {
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let vals: Vec<f64> = points
        .iter()
        .map(|&t| feasibility_phi(t, summaries))
        .collect();
    for w in vals.windows(2) {
        prop_assert!(w[1] >= w[0] - 1e-12, "phi decreased: {} -> {}", w[0], w[1]);
    }
    let k = summaries.len() as f64;
    let limit = k - summaries.iter().map(|s| s.drop_prob).sum::<f64>();
    prop_assert!(vals.iter().all(|&v| v <= limit + 1e-12));
    Ok(())
}

/// Feasibility boundary, budget tightness, minimality, Cantelli constraints
/// and dominance of the optimal policy over the baseline.
pub fn check_solutions(
    summaries: &[PathSummary],
    budget: ReliabilityBudget,
) -> Result<(), TestCaseError> {
    let eps = budget.epsilon();
    let opt = solve_min_twi(summaries, budget, TOL_MS).unwrap();
    let uni = solve_uniform_baseline(summaries, budget).unwrap();
    let total: f64 = summaries.iter().map(|s| s.drop_prob).sum();
    prop_assert_eq!(opt.feasible, total <= eps);
    prop_assert_eq!(uni.feasible, total <= eps);
    if !opt.feasible {
        prop_assert!(opt.twi.is_none() && uni.twi.is_none());
        return Ok(());
    }
    let twi = opt.twi.unwrap();
    let k = summaries.len() as f64;
    prop_assert!(
        opt.total_epsilon() <= eps + 1e-9,
        "sum eps {} > {}",
        opt.total_epsilon(),
        eps
    );
    prop_assert!(feasibility_phi(twi, summaries) >= k - eps - 1e-12);
    let lower = summaries
        .iter()
        .map(|s| s.mean_ms)
        .fold(f64::NEG_INFINITY, f64::max);
    if twi - 2.0 * TOL_MS >= lower {
        prop_assert!(feasibility_phi(twi - 2.0 * TOL_MS, summaries) < k - eps);
    }
    for (s, a) in summaries.iter().zip(&opt.per_path) {
        prop_assert!(a.alpha >= ALPHA_MIN - 1e-15 && a.alpha <= 1.0);
        prop_assert!((a.epsilon - (1.0 - (1.0 - s.drop_prob) * a.alpha)).abs() < 1e-12);
        if a.alpha > ALPHA_MIN && a.alpha < 1.0 {
            let need = s.mean_ms + s.std_dev() * cantelli_theta(a.alpha).unwrap();
            // Rebuilding the bound from alpha loses digits as 1 - alpha shrinks.
            let slack = 1e-6 + need.abs() * 4.0 * f64::EPSILON / (1.0 - a.alpha);
            prop_assert!(twi >= need - slack, "TWI {} < {}", twi, need);
        }
        if a.alpha == 1.0 {
            prop_assert!(twi > s.mean_ms || s.variance_ms2 == 0.0);
        }
    }
    let u = uni.twi.unwrap();
    prop_assert!(u >= twi - TOL_MS, "uniform {} < optimal {}", u, twi);
    prop_assert!(uni.total_epsilon() <= eps + 1e-9);
    Ok(())
}

pub fn check_against_grid(
    summaries: &[PathSummary],
    budget: ReliabilityBudget,
) -> Result<(), TestCaseError> {
    let opt = solve_min_twi(summaries, budget, TOL_MS)
        .unwrap()
        .twi
        .unwrap();
    let grid = grid_min_twi(summaries, budget.epsilon());
    prop_assert!(
        (opt - grid).abs() <= 2.0 * TOL_MS,
        "bisection {} vs grid {}",
        opt,
        grid
    );
    Ok(())
}

/// Moments of a composed path PMF equal the sum of stage moments.
pub fn check_path_moments(path: PathSpec) -> Result<(), TestCaseError> {
    let full = twi_core::summarize_path(&path).unwrap();
    let light = summarize_path_moments(&path).unwrap();
    let pmf = full.pmf.as_ref().unwrap();
    check_normalised(pmf)?;
    prop_assert!((pmf.mean() - light.mean_ms).abs() <= 1e-8 * (1.0 + light.mean_ms));
    prop_assert!((pmf.variance() - light.variance_ms2).abs() <= 1e-6 * (1.0 + light.variance_ms2));
    Ok(())
}

// ---------------------------------------------------------------- sampling

/// Central moments `(mean, variance, mu4)` of a frame PMF in ms units.
pub fn pmf_central_moments(d: &StageDistribution) -> (f64, f64, f64) {
    let mean = d.mean();
    let (mut m2, mut m4) = (0.0, 0.0);
    for (_, t, p) in d.iter() {
        let x = t - mean;
        m2 += p * x * x;
        m4 += p * x.powi(4);
    }
    (mean, m2, m4)
}

/// Standard errors of the sample mean and sample variance over `n` draws.
pub fn standard_errors(var: f64, mu4: f64, n: usize) -> (f64, f64) {
    let n = n as f64;
    ((var / n).sqrt(), ((mu4 - var * var).max(0.0) / n).sqrt())
}
