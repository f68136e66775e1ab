//! Deterministic, error-controlled lattice sums `Σ_{(m,n,p)≠0} w(m,n,p) f(Q)`.
//!
//! Every formula downstream (energies, gradients, Hessians, theta and zeta
//! functions) instantiates this summation template. Enumeration is over exact
//! ellipsoids `Q ≤ Λ` on a ladder of cutoffs `Λ, gΛ, g²Λ, …` in a fixed loop
//! order with compensated accumulation, so results are bit-stable across runs.
//!
//! Tail control: for a summand decaying like `Q^(-η_eff)` the increments per
//! ladder rung shrink geometrically with ratio `r = g^((3-2η_eff)/2)`; the
//! reported value includes the geometric tail extrapolation `ΔS·r/(1-r)` and
//! the error estimate is the change between consecutive extrapolated values.
//! Exponentially decaying summands use the raw increment as the estimate.

pub mod automorphs;
pub mod kahan;
pub mod shells;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::LatticeParams;
use crate::potentials::{pow_deriv_coeff, Potential, PotentialAtoms};
use kahan::NeumaierSum;

/// Default cutoff growth per ladder rung (`2^(2/3)`: doubles the enclosed
/// point count per rung).
pub fn default_cutoff_growth() -> f64 {
    2f64.powf(2.0 / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SumStrategy {
    /// Ladder of ellipsoidal cutoffs with geometric tail extrapolation.
    Direct { cutoff_growth: f64 },
    /// Exact truncated shell sum of the FCC form (valid only when the lattice
    /// parameters are the FCC point, where `Q = C·R`).
    RTruncated { t_max: u32 },
    /// Incomplete-gamma split over the lattice and its dual (power-law,
    /// weight-1 sums only); exponentially convergent, continues `s` below 3/2.
    GammaAccelerated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumConfig {
    /// Absolute tolerance on the sum value.
    pub target_tol: f64,
    pub strategy: SumStrategy,
    /// Budget on summand evaluations across all ladder rungs.
    pub max_points: u64,
}

impl SumConfig {
    /// Default for exponentially decaying summands.
    pub fn gaussian() -> Self {
        Self {
            target_tol: 1e-12,
            strategy: SumStrategy::Direct { cutoff_growth: default_cutoff_growth() },
            max_points: 400_000_000,
        }
    }

    /// Default for power-law summands.
    pub fn power() -> Self {
        Self { target_tol: 1e-9, ..Self::gaussian() }
    }

    pub fn for_potential(pot: &Potential) -> Self {
        match pot {
            Potential::Gaussian { .. } => Self::gaussian(),
            _ => Self::power(),
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.target_tol = tol;
        self
    }

    pub fn tightened(mut self, factor: f64) -> Self {
        self.target_tol /= factor;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumResult {
    pub value: f64,
    pub est_error: f64,
    pub points_used: u64,
    pub converged: bool,
}

#[derive(Debug, Error)]
pub enum SumError {
    #[error("sum does not converge: {reason}")]
    NotConvergent { reason: String },
    #[error("point budget exhausted at {} points (est_error {:.3e})", partial.points_used, partial.est_error)]
    Budget { partial: SumResult },
}

/// Polynomial weight descriptor: an evaluation closure plus its total degree
/// (for the convergence precondition and tail model). `tag` identifies
/// standard weights for memoization of volume-independent power-law sums;
/// untagged weights are never cached.
pub struct Weight<'a> {
    pub degree: u32,
    pub tag: Option<u64>,
    pub eval: &'a dyn Fn(i64, i64, i64) -> f64,
}

impl<'a> Weight<'a> {
    pub fn new(degree: u32, eval: &'a dyn Fn(i64, i64, i64) -> f64) -> Self {
        Self { degree, tag: None, eval }
    }

    pub fn tagged(degree: u32, tag: u64, eval: &'a dyn Fn(i64, i64, i64) -> f64) -> Self {
        Self { degree, tag: Some(tag), eval }
    }

    pub fn one() -> Weight<'static> {
        Weight { degree: 0, tag: Some(0), eval: &|_, _, _| 1.0 }
    }
}

pub(crate) enum TailModel {
    Exponential,
    Power { eta_eff: f64 },
}

/// One ellipsoid pass: `Σ term(m,n,p,q̃)` over `0 < q̃ ≤ λ` in fixed order.
/// Returns (compensated sum, Σ|term|, accepted point count).
fn ellipsoid_pass(
    params: &LatticeParams,
    lambda: f64,
    term: &mut dyn FnMut(i64, i64, i64, f64) -> f64,
) -> (f64, f64, u64) {
    let (u, v, x, y, z) = (params.u, params.v, params.x, params.y, params.z);
    let mut acc = NeumaierSum::new();
    let mut abs = 0.0f64;
    let mut count = 0u64;
    let p_max = (v * (2.0 * lambda).sqrt() / u).floor() as i64 + 1;
    for p in -p_max..=p_max {
        let pf = p as f64;
        let rem_p = lambda - u * u * pf * pf / (2.0 * v * v);
        if rem_p < 0.0 {
            continue;
        }
        let half_n = (rem_p * u).sqrt() / v;
        let n_lo = (-z * pf - half_n).floor() as i64;
        let n_hi = (-z * pf + half_n).ceil() as i64;
        for n in n_lo..=n_hi {
            let nf = n as f64;
            let b = nf + z * pf;
            let rem_n = rem_p - v * v * b * b / u;
            if rem_n < 0.0 {
                continue;
            }
            let half_m = (rem_n * u).sqrt();
            let mid = -x * nf - y * pf;
            let m_lo = (mid - half_m).floor() as i64;
            let m_hi = (mid + half_m).ceil() as i64;
            for m in m_lo..=m_hi {
                if m == 0 && n == 0 && p == 0 {
                    continue;
                }
                let mf = m as f64;
                let a = mf + x * nf + y * pf;
                let qt = (a * a + v * v * b * b) / u + u * u * pf * pf / (2.0 * v * v);
                if qt <= lambda {
                    let t = term(m, n, p, qt);
                    acc.add(t);
                    abs += t.abs();
                    count += 1;
                }
            }
        }
    }
    (acc.value(), abs, count)
}

/// Ladder evaluation of `Σ term` with the tail model above.
pub(crate) fn ladder_sum(
    params: &LatticeParams,
    tol: f64,
    max_points: u64,
    growth: f64,
    tail: TailModel,
    term: &mut dyn FnMut(i64, i64, i64, f64) -> f64,
) -> Result<SumResult, SumError> {
    let diag = params.reduced_diag();
    let mut lambda = 12.0 * diag.iter().fold(f64::MIN_POSITIVE, |a, &d| a.max(d));
    let ratio = match tail {
        TailModel::Exponential => 0.0,
        TailModel::Power { eta_eff } => growth.powf((3.0 - 2.0 * eta_eff) / 2.0),
    };

    let mut points = 0u64;
    let mut prev_raw: Option<f64> = None;
    let mut prev_extrap: Option<f64> = None;
    let mut prev_delta = f64::INFINITY;
    loop {
        let (raw, abs, count) = ellipsoid_pass(params, lambda, term);
        points += count;
        let floor = 1e-16 * abs;
        let (value, est, delta) = match prev_raw {
            None => (raw, f64::INFINITY, f64::INFINITY),
            Some(last) => {
                let delta = raw - last;
                let extrap = raw + delta * ratio / (1.0 - ratio);
                let est = match prev_extrap {
                    None => f64::INFINITY,
                    Some(pe) => ((extrap - pe).abs() + floor).max(floor),
                };
                prev_extrap = Some(extrap);
                (extrap, est, delta.abs())
            }
        };
        prev_raw = Some(raw);
        let tail_entered = delta <= prev_delta + floor;
        if est <= tol && tail_entered {
            return Ok(SumResult { value, est_error: est, points_used: points, converged: true });
        }
        prev_delta = delta;
        if points > max_points {
            return Err(SumError::Budget {
                partial: SumResult { value, est_error: est, points_used: points, converged: false },
            });
        }
        lambda *= growth;
    }
}

/// Exponentially decaying sum (internal hook for the special-function layer).
pub(crate) fn exponential_sum(
    params: &LatticeParams,
    tol: f64,
    max_points: u64,
    term: &mut dyn FnMut(i64, i64, i64, f64) -> f64,
) -> Result<SumResult, SumError> {
    ladder_sum(params, tol, max_points, default_cutoff_growth(), TailModel::Exponential, term)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct PowerKey {
    shape: [u64; 5],
    tag: u64,
    sigma: u64,
    tol: u64,
    growth: u64,
}

static POWER_CACHE: OnceLock<Mutex<HashMap<PowerKey, SumResult>>> = OnceLock::new();

/// Volume-free power sum `Σ w(m,n,p) · q̃^(-sigma)` where `q̃ = Q/C`.
///
/// Memoized for tagged weights, keyed on the exact bits of the shape
/// parameters, exponent and tolerance (deterministic).
pub(crate) fn reduced_power_sum(
    params: &LatticeParams,
    weight: &Weight,
    sigma: f64,
    tol: f64,
    growth: f64,
    max_points: u64,
) -> Result<SumResult, SumError> {
    let eta_eff = sigma - weight.degree as f64 / 2.0;
    if eta_eff <= 1.5 {
        return Err(SumError::NotConvergent {
            reason: format!(
                "effective decay {eta_eff} ≤ 3/2 for exponent {sigma} with weight degree {}",
                weight.degree
            ),
        });
    }
    let key = weight.tag.map(|tag| PowerKey {
        shape: [
            params.u.to_bits(),
            params.v.to_bits(),
            params.x.to_bits(),
            params.y.to_bits(),
            params.z.to_bits(),
        ],
        tag,
        sigma: sigma.to_bits(),
        tol: tol.to_bits(),
        growth: growth.to_bits(),
    });
    if let Some(k) = key {
        let cache = POWER_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(hit) = cache.lock().unwrap().get(&k) {
            return Ok(*hit);
        }
    }
    let eval = weight.eval;
    let result = ladder_sum(
        params,
        tol,
        max_points,
        growth,
        TailModel::Power { eta_eff },
        &mut |m, n, p, qt| eval(m, n, p) * qt.powf(-sigma),
    )?;
    if let Some(k) = key {
        let cache = POWER_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        cache.lock().unwrap().insert(k, result);
    }
    Ok(result)
}

fn is_fcc_shape(params: &LatticeParams) -> bool {
    (params.u - 1.0).abs() < 1e-12
        && (params.v - 1.0).abs() < 1e-12
        && params.x.abs() < 1e-12
        && (params.y - 0.5).abs() < 1e-12
        && (params.z - 0.5).abs() < 1e-12
}

/// `Σ_{(m,n,p) ≠ 0} weight(m,n,p) · f^(order)(Q(m,n,p))`.
///
/// Direct strategy: Gaussian potentials sum on the cutoff ladder; power-law
/// potentials decompose into `coeff · r^(-s)` atoms whose volume-independent
/// reduced sums are evaluated (and memoized) separately. Convergence
/// precondition for a power atom: `2(s + order) > 3 + degree`.
pub fn lattice_sum(
    params: &LatticeParams,
    weight: &Weight,
    pot: &Potential,
    order: u32,
    cfg: &SumConfig,
) -> Result<SumResult, SumError> {
    assert!(order <= 2);
    match cfg.strategy {
        SumStrategy::RTruncated { t_max } => {
            if !is_fcc_shape(params) {
                return Err(SumError::NotConvergent {
                    reason: "shell-truncated strategy requires the FCC parameter point".into(),
                });
            }
            let c = params.c();
            let eval = weight.eval;
            let half = shells::r_shell_sum(t_max / 2, eval, |t| {
                pot.eval(c * t, order).unwrap_or(0.0)
            });
            let full = shells::r_shell_sum(t_max, eval, |t| pot.eval(c * t, order).unwrap_or(0.0));
            let est = (full - half).abs();
            let table = shells::shell_table(t_max);
            let points: u64 = table.count[1..=t_max as usize].iter().map(|&c| c as u64).sum();
            Ok(SumResult {
                value: full,
                est_error: est,
                points_used: points,
                converged: est <= cfg.target_tol,
            })
        }
        SumStrategy::GammaAccelerated => {
            if weight.degree != 0 {
                return Err(SumError::NotConvergent {
                    reason: "accelerated backend supports weight 1 only".into(),
                });
            }
            match pot.atoms() {
                PotentialAtoms::Exponential { .. } => {
                    // exponential summands are already fast directly
                    lattice_sum(
                        params,
                        weight,
                        pot,
                        order,
                        &SumConfig {
                            strategy: SumStrategy::Direct { cutoff_growth: default_cutoff_growth() },
                            ..*cfg
                        },
                    )
                }
                PotentialAtoms::Powers(terms) => {
                    let mut value = 0.0;
                    let mut est = 0.0;
                    let mut points = 0;
                    let mut converged = true;
                    for t in &terms {
                        let coeff = t.coeff * pow_deriv_coeff(t.exponent, order);
                        let s_tot = t.exponent + order as f64;
                        let part = crate::special::epstein_zeta_sumresult(
                            params,
                            2.0 * s_tot,
                            cfg.target_tol / (terms.len() as f64 * coeff.abs().max(1e-300)),
                            cfg.max_points,
                        )
                        .map_err(|e| SumError::NotConvergent { reason: e.to_string() })?;
                        value += coeff * part.value;
                        est += coeff.abs() * part.est_error;
                        points += part.points_used;
                        converged &= part.converged;
                    }
                    Ok(SumResult { value, est_error: est, points_used: points, converged })
                }
            }
        }
        SumStrategy::Direct { cutoff_growth } => match pot.atoms() {
            PotentialAtoms::Exponential { alpha } => {
                let rate = alpha * params.c();
                let sign = match order {
                    0 => 1.0,
                    1 => -alpha,
                    _ => alpha * alpha,
                };
                let eval = weight.eval;
                ladder_sum(
                    params,
                    cfg.target_tol,
                    cfg.max_points,
                    cutoff_growth,
                    TailModel::Exponential,
                    &mut |m, n, p, qt| sign * eval(m, n, p) * (-rate * qt).exp(),
                )
            }
            PotentialAtoms::Powers(terms) => {
                let c = params.c();
                let mut value = 0.0;
                let mut est = 0.0;
                let mut points = 0;
                let mut converged = true;
                for t in &terms {
                    let s_tot = t.exponent + order as f64;
                    let scale = t.coeff * pow_deriv_coeff(t.exponent, order) * c.powf(-s_tot);
                    let tol_part = cfg.target_tol / (terms.len() as f64 * scale.abs().max(1e-300));
                    // quantize to decade boundaries (rounding tighter) so the
                    // volume-independent reduced sums stay cache-shareable
                    // across nearby volumes
                    let tol_part = 10f64.powf(tol_part.log10().floor());
                    let part = reduced_power_sum(
                        params,
                        weight,
                        s_tot,
                        tol_part,
                        cutoff_growth,
                        cfg.max_points,
                    )?;
                    value += scale * part.value;
                    est += scale.abs() * part.est_error;
                    points += part.points_used;
                    converged &= part.converged;
                }
                Ok(SumResult { value, est_error: est, points_used: points, converged })
            }
        },
    }
}

/// Deterministic theta-type sum `Σ' e^(-alpha Q)` (no weight), used by the
/// special-function layer.
pub fn gaussian_weight1_sum(
    params: &LatticeParams,
    alpha: f64,
    tol: f64,
    max_points: u64,
) -> Result<SumResult, SumError> {
    let rate = alpha * params.c();
    exponential_sum(params, tol, max_points, &mut |_, _, _, qt| (-rate * qt).exp())
}

pub use shells::{cumulative_t, for_each_r_triple, r_shell_sum, r_shell_weight_sums, shell_table};
