//! Volume sweeps of the cubic-lattice classifications for the classical
//! Lennard-Jones potential, and the Gaussian-rate duality of the FCC/BCC
//! crossovers.

use lattab_core::potentials::Potential;
use lattab_core::stability::{self, Classification, Tolerances};
use lattab_core::LatticeParams;

fn lj_classic() -> Potential {
    Potential::lennard_jones(2.0, 1.0, 3.0, 6.0).unwrap()
}

fn sweep(make: impl Fn(f64) -> LatticeParams) -> Vec<(f64, Classification)> {
    let pot = lj_classic();
    let cfg = stability::default_config(&pot);
    let tols = Tolerances::default();
    (0..=140)
        .map(|i| {
            let v = 0.6 + 0.01 * i as f64;
            let rep = stability::classify(&pot, &make(v), &cfg, &tols)
                .unwrap_or_else(|e| panic!("classify failed at V={v}: {e}"));
            (v, rep.classification)
        })
        .collect()
}

/// Volumes where consecutive grid points change classification.
fn transitions(rows: &[(f64, Classification)]) -> Vec<(f64, Classification, Classification)> {
    rows.windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| (w[1].0, w[0].1, w[1].1))
        .collect()
}

#[test]
fn cubic_sweep_is_saddle_min_saddle() {
    let rows = sweep(LatticeParams::cubic);
    for (v, class) in &rows {
        assert_ne!(*class, Classification::LocalMax, "cubic must never be a local max (V={v})");
    }
    let tr = transitions(&rows);
    assert_eq!(tr.len(), 2, "expected exactly two transitions, got {tr:?}");
    assert_eq!((tr[0].1, tr[0].2), (Classification::Saddle, Classification::LocalMin));
    assert_eq!((tr[1].1, tr[1].2), (Classification::LocalMin, Classification::Saddle));
    // lower boundary: the xx root V1 ≈ 1.2002
    let pot = lj_classic();
    let cfg = lattab_core::sums::SumConfig::power().with_tol(1e-9);
    let ts = stability::lj_z3_thresholds(&pot, &cfg).unwrap();
    let v1 = ts.iter().find(|t| t.name == "V1").unwrap().value;
    assert!((tr[0].0 - v1).abs() <= 0.011, "lower transition {} vs V1 {v1}", tr[0].0);
    // upper boundary follows the validated uu row (∂²vv ∝ ∂²uu there, so the
    // printed-coefficient determinant root V2 is not where classify flips)
    let upper = stability::lj_z3_validated_upper_boundary(&pot, &cfg).unwrap();
    assert!(
        (tr[1].0 - upper).abs() <= 0.011,
        "upper transition {} vs validated boundary {upper}",
        tr[1].0
    );
    let v2 = ts.iter().find(|t| t.name == "V2").unwrap().value;
    assert!((tr[1].0 - v2).abs() > 0.02, "flip unexpectedly at printed V2 = {v2}");
}

#[test]
fn fcc_sweep_is_min_saddle_max() {
    let rows = sweep(LatticeParams::fcc);
    let tr = transitions(&rows);
    assert_eq!(tr.len(), 2, "expected exactly two transitions, got {tr:?}");
    assert_eq!((tr[0].1, tr[0].2), (Classification::LocalMin, Classification::Saddle));
    assert_eq!((tr[1].1, tr[1].2), (Classification::Saddle, Classification::LocalMax));
    let th = stability::lj_fcc_thresholds(&lj_classic(), 1e-9).unwrap();
    assert!((tr[0].0 - th.v_lo).abs() <= 0.011, "lower transition {} vs v_lo {}", tr[0].0, th.v_lo);
    assert!((tr[1].0 - th.v_hi).abs() <= 0.011, "upper transition {} vs v_hi {}", tr[1].0, th.v_hi);
}

#[test]
fn gaussian_crossovers_are_poisson_dual() {
    // classification of the FCC lattice at rate α maps to its dual (BCC) at
    // rate π²/α, so the two minimal-eigenvalue crossovers must multiply to π²
    let grid: Vec<f64> = (0..40)
        .map(|i| 0.5 * (30.0f64).powf(i as f64 / 39.0))
        .collect();
    let scan = stability::theta_alpha_scan(1.0, &grid).unwrap();
    let d3: Vec<f64> = scan
        .crossovers
        .iter()
        .filter(|c| c.lattice == "d3")
        .map(|c| c.alpha)
        .collect();
    let d3star: Vec<f64> = scan
        .crossovers
        .iter()
        .filter(|c| c.lattice == "d3star")
        .map(|c| c.alpha)
        .collect();
    assert_eq!(d3.len(), 1, "expected a single FCC crossover, got {d3:?}");
    assert_eq!(d3star.len(), 1, "expected a single BCC crossover, got {d3star:?}");
    let product = d3[0] * d3star[0];
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    assert!(
        (product - pi2).abs() < 1e-3 * pi2,
        "crossover product {product} vs π² = {pi2}"
    );
    // classifications mirror across the duality map on the sampled grid
    for row in &scan.rows {
        let dual_alpha = pi2 / row.alpha;
        if let Some(partner) = scan
            .rows
            .iter()
            .min_by(|a, b| {
                (a.alpha - dual_alpha)
                    .abs()
                    .partial_cmp(&(b.alpha - dual_alpha).abs())
                    .unwrap()
            })
        {
            if (partner.alpha - dual_alpha).abs() < 0.02 * dual_alpha {
                assert_eq!(
                    row.class_d3, partner.class_d3_star,
                    "duality mismatch at α = {} (partner {})",
                    row.alpha, partner.alpha
                );
            }
        }
    }
}
