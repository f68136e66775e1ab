//! Property tests over random lattice parameters.

use lattab_core::lattice::{r_form, t_form, LatticeParams};
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = LatticeParams> {
    (
        0.6f64..1.8,
        0.6f64..1.8,
        -0.6f64..0.6,
        -0.6f64..0.6,
        -0.6f64..0.6,
        0.4f64..2.5,
    )
        .prop_map(|(u, v, x, y, z, vol)| LatticeParams::new(u, v, x, y, z, vol).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn basis_determinant_is_volume(p in params_strategy()) {
        let det = p.basis().det();
        prop_assert!((det - p.volume).abs() <= 1e-12 * p.volume);
    }

    #[test]
    fn params_roundtrip_through_basis(p in params_strategy()) {
        let q = p.basis().params().unwrap();
        prop_assert!((q.u - p.u).abs() < 1e-10);
        prop_assert!((q.v - p.v).abs() < 1e-10);
        prop_assert!((q.x - p.x).abs() < 1e-10);
        prop_assert!((q.y - p.y).abs() < 1e-10);
        prop_assert!((q.z - p.z).abs() < 1e-10);
    }

    #[test]
    fn dual_dual_preserves_gram(p in params_strategy()) {
        let dd = p.dual().dual();
        prop_assert!(dd.gram_distance(&p) < 1e-10 * p.c());
    }

    #[test]
    fn quadratic_form_positive_definite(p in params_strategy(), m in -6i64..=6, n in -6i64..=6, pp in -6i64..=6) {
        if (m, n, pp) != (0, 0, 0) {
            prop_assert!(p.quadratic_form(m, n, pp) > 0.0);
        }
    }

    #[test]
    fn form_inequality_four_t_below_r_squared(m in -40i64..=40, n in -40i64..=40, p in -40i64..=40) {
        let r = r_form(m, n, p);
        let t = t_form(m, n, p);
        prop_assert!(4 * t.abs() <= r * r);
    }
}
