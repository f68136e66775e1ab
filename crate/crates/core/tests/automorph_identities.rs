//! The 19 weight identities of the FCC form, checked on exponential sums.

use lattab_core::sums::automorphs::automorph_checks;

#[test]
fn all_identities_hold_on_truncated_shells() {
    for beta in [0.5, 1.0, 2.0] {
        for check in automorph_checks(beta, 40) {
            if check.rhs == 0.0 {
                assert!(
                    check.residual_abs <= 1e-12,
                    "{} at beta={beta}: lhs={} (abs residual {})",
                    check.name,
                    check.lhs,
                    check.residual_abs
                );
            } else {
                assert!(
                    check.residual_rel <= 1e-10,
                    "{} at beta={beta}: lhs={} rhs={} (rel residual {})",
                    check.name,
                    check.lhs,
                    check.rhs,
                    check.residual_rel
                );
            }
        }
    }
}

#[test]
fn doubling_the_shell_cutoff_changes_nothing() {
    // the R > 40 tail of Σ w e^(-βR) is ~poly(40)·e^(-40β): below 1e-10
    // relative for β ≥ 1, and up to ~1e-6 relative at β = 0.5 for the
    // degree-4 weights
    for (beta, rel_bound) in [(0.5, 1e-5), (1.0, 1e-10), (2.0, 1e-10)] {
        let a = automorph_checks(beta, 40);
        let b = automorph_checks(beta, 80);
        for (ca, cb) in a.iter().zip(&b) {
            let scale = ca.lhs.abs().max(cb.lhs.abs()).max(1e-300);
            if scale > 1e-12 {
                assert!(
                    (ca.lhs - cb.lhs).abs() / scale < rel_bound,
                    "{} lhs drifts at beta={beta}: {} -> {}",
                    ca.name,
                    ca.lhs,
                    cb.lhs
                );
            }
            let scale = ca.rhs.abs().max(cb.rhs.abs());
            if scale > 1e-12 {
                assert!((ca.rhs - cb.rhs).abs() / scale < rel_bound);
            }
        }
    }
}

#[test]
fn zero_identities_are_exact_per_shell() {
    // the automorph group preserves each shell, so integer weight sums cancel
    // exactly, not just in the aggregate
    use lattab_core::sums::r_shell_weight_sums;
    for (name, weight) in [
        ("aut1", (|_m, n, p| (4 * n * n + 4 * n * p - p * p) as f64) as fn(i64, i64, i64) -> f64),
        ("aut2", |m, n, p| (n * (2 * m + p)) as f64),
        ("aut16", |m, n, p| (n * p * (2 * m + p) * (2 * n + p)) as f64),
    ] {
        for (t, w) in r_shell_weight_sums(50, weight).iter().enumerate() {
            assert_eq!(*w, 0.0, "{name} shell sum at R={t} is {w}");
        }
    }
}
