use super::*;

#[test]
fn quick_acceptance_grid_passes() {
    let reports = acceptance_grid(true);
    assert!(!reports.is_empty());
    for r in &reports {
        assert!(
            r.passed(),
            "{} {:?}: {:?} ({})",
            r.check,
            r.params,
            r.status,
            r.witness
        );
    }
}

#[test]
fn report_json_round_trips() {
    let reports = suite_smow(3, 1);
    let json = serde_json::to_string(&reports).unwrap();
    let back: Vec<VerificationReport> = serde_json::from_str(&json).unwrap();
    assert_eq!(back.len(), reports.len());
    assert_eq!(back[0].check, reports[0].check);
    assert_eq!(back[0].status, reports[0].status);
    assert_eq!(back[0].params, reports[0].params);
}

#[test]
fn budget_is_reported_not_panicked() {
    // an impossible parameter escapes as cannot-certify, not a crash
    let reports = suite_str(3, 1, 1, &num_bigint::BigInt::from(10));
    // 10 = 1 + 9 is in U_2 but not an exact cube
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].status, Status::CannotCertify);
}

#[test]
fn torsor_vanishing_reports_pass() {
    for (nu, a) in [(1u32, 4i64), (2, 4), (2, 10)] {
        let reports = suite_str(3, nu, 2, &num_bigint::BigInt::from(a));
        for r in &reports {
            assert!(r.passed(), "nu={} a={}: {}", nu, a, r.witness);
        }
    }
}

#[test]
fn randomized_suites_pass_under_alternate_seeds() {
    for seed in [DEFAULT_SEED, 1, 2, 3] {
        for r in suite_lemmas(3, seed) {
            assert!(r.passed(), "seed {}: {} ({})", seed, r.check, r.witness);
        }
    }
}
