//! One test per acceptance criterion. Each prints a PASS/FAIL line before asserting.

use spherical_gas::acceptance::{self, CriterionReport};

fn check(report: CriterionReport) {
    println!("{report}");
    assert!(report.passed, "{report}");
}

#[test]
fn criterion_1_beta_norm_oracle() {
    check(acceptance::beta_norm_oracle());
}

#[test]
fn criterion_2_partition_function_oracle() {
    check(acceptance::partition_function_oracle());
}

#[test]
fn criterion_3_theorem_example_consistency() {
    check(acceptance::theorem_example_consistency());
}

#[test]
fn criterion_4_spherical_residual_law() {
    check(acceptance::spherical_residual_law());
}

#[test]
fn criterion_5_general_measure_check() {
    check(acceptance::general_measure_check());
}

#[test]
fn criterion_6_regime_predictor_decay() {
    check(acceptance::regime_predictor_decay());
}

#[test]
fn criterion_7_special_function_suite() {
    check(acceptance::special_function_suite());
}

#[test]
fn criterion_8_functional_covariance() {
    check(acceptance::functional_covariance());
}

#[test]
fn criterion_9_geometry_conversion() {
    check(acceptance::geometry_conversion());
}
