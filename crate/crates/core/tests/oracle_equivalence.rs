//! Frozen-fixture equivalence against the 60-digit reference evaluator.
//!
//! `tests/fixtures/cv_oracle.json` holds 150 randomized parameter sets
//! (50 per rate family) with mutual information, Holevo bound and key rate
//! computed by `tools/cv_oracle.py`. The f64 implementation must agree to
//! 1e-9 relative on every quantity.

mod common;

fn check(prefix: &str) {
    let fx = common::load_fixtures();
    let results = common::evaluate_fixtures(&fx);
    let mut checked = 0;
    for (label, actual, expected) in results {
        if !label.starts_with(prefix) {
            continue;
        }
        checked += 1;
        let tol = 1e-9 * expected.abs().max(1e-12);
        assert!(
            (actual - expected).abs() <= tol,
            "{label}: {actual} vs oracle {expected}"
        );
    }
    assert_eq!(checked, 150, "expected 50 cases x 3 quantities");
}

#[test]
fn gaussian_matches_oracle_on_all_cases() {
    check("gaussian");
}

#[test]
fn psk_matches_oracle_on_all_cases() {
    check("psk");
}

#[test]
fn cka_matches_oracle_on_all_cases() {
    check("cka");
}
