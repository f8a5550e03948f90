//! Randomized invariants: inversion, peeling, Frobenius reciprocity,
//! propagation, and non-negativity of graded dimensions.

mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn inversion_matches_column_back_substitution(d in unitriangular(20)) {
        prop_assert_eq!(check_inverse(&d), Ok(()));
    }
}

#[test]
fn peel_methods_agree_on_every_bundled_context() {
    let data = data();
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(64));
    for ctx in peel_contexts(&data) {
        runner
            .run(&class_in(&ctx), |v| {
                prop_assert_eq!(check_peel_agreement(&v, &ctx), Ok(()));
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn induction_is_transpose_of_restriction() {
    let data = data();
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(256));
    assert!(!data.branching_tables().is_empty());
    for t in data.branching_tables() {
        runner
            .run(&frobenius_pair(t), |(v, w)| {
                prop_assert_eq!(check_frobenius(t, &v, &w), Ok(()));
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn propagation_is_monotone_and_idempotent() {
    let data = data();
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(16));
    for b in propagation_blocks(&data) {
        runner
            .run(&prop::collection::vec(prop::bool::weighted(0.2), 1..64), |mask| {
                prop_assert_eq!(check_propagation(&b, &mask), Ok(()));
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn graded_dimensions_are_non_negative_through_depth_40() {
    assert_eq!(negative_graded_dims(&data(), 40), Vec::<String>::new());
}
