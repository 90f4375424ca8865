//! Randomized invariants: orthonormality, PSD, range, dominance, determinism and
//! idempotence, 100 cases each.

mod support;

use proptest::prelude::*;
use support::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bases_are_orthonormal(input in series_input()) {
        prop_orthonormal(&input)?;
    }

    #[test]
    fn covariances_are_psd(input in series_input()) {
        prop_psd(&input)?;
    }

    #[test]
    fn population_floors_are_ordered(input in dgp_input()) {
        prop_bounds_range(&input)?;
    }

    #[test]
    fn optimal_floor_dominates(input in series_input()) {
        prop_dominance(&input)?;
    }

    #[test]
    fn fitting_is_deterministic(input in series_input()) {
        prop_determinism(&input)?;
    }

    #[test]
    fn projection_and_preprocessing_are_idempotent(input in series_input()) {
        prop_idempotence(&input)?;
    }

    #[test]
    fn removed_share_is_a_proportion(removed in 0.0f64..10.0, remaining in 0.0f64..10.0) {
        let share = fdenoise::model::removed_proportion(removed, remaining);
        prop_assert!((0.0..=1.0).contains(&share));
    }
}
