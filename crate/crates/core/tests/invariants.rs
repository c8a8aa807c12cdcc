mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stage_pmfs_are_normalised(p in event_to_sensor(), c in computation(), r in retry(), tf in frame()) {
        check_stage_pmfs(p, c, r, tf)?;
    }

    #[test]
    fn geometric_closed_form_matches_summation(r in retry(), tf in frame()) {
        check_geometric_moments(r, tf)?;
    }

    #[test]
    fn supports_respect_bounds(p in event_to_sensor(), c in computation(), r in retry(), tf in frame()) {
        check_support_bounds(p, c, r, tf)?;
    }

    #[test]
    fn drop_probability_is_monotone(path in relayed_path(), bump in 0.0f64..0.3) {
        check_drop_monotone(path, bump)?;
    }

    #[test]
    fn phi_is_nondecreasing((s, _) in instance(), pts in prop::collection::vec(0.0f64..5000.0, 2..40)) {
        check_phi_monotone(&s, pts)?;
    }

    #[test]
    fn solutions_satisfy_constraints((s, b) in instance()) {
        check_solutions(&s, b)?;
    }

    #[test]
    fn path_pmf_moments_match_stage_sums(path in relayed_path()) {
        check_path_moments(path)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bisection_matches_grid_search((s, b) in zero_drop_instance()) {
        check_against_grid(&s, b)?;
    }
}
