//! Special functions: 1D Jacobi theta, lattice theta, Epstein zeta (direct
//! and incomplete-gamma accelerated), and the FCC shell series `Σ R^(-s)`,
//! `Y(s) = Σ T/R^(s+2)` with the derived combinations `G`, `H`.

pub mod gamma;

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::lattice::LatticeParams;
use crate::sums::{self, shell_table, SumError, SumResult};

pub use gamma::{gamma as gamma_fn, recip_gamma, upper_gamma};

#[derive(Debug, Error)]
pub enum SpecialError {
    #[error("argument must be positive (got {0})")]
    NonPositiveArgument(f64),
    #[error("Epstein zeta has a pole at s = 3/2")]
    PoleAt3Halves,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Sum(#[from] SumError),
}

/// θ₃(s) = Σ_k e^(-π k² s) with its first two derivatives in s.
///
/// For all s > 0: θ₃ > 1, θ₃' < 0, θ₃'' > 0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Theta1DValue {
    pub s: f64,
    pub th: f64,
    pub th1: f64,
    pub th2: f64,
}

/// Direct 1D sums (θ₃, θ₃', θ₃'') without the modular transformation.
///
/// Converges for every s > 0 (slowly for small s); the number of terms is
/// `⌈√(42/(πs))⌉ + 3`, enough for ~1e-15 absolute tails. Exposed so identity
/// tests can avoid the modular branch on both sides.
pub fn theta3_direct_sums(s: f64) -> (f64, f64, f64) {
    let k_max = (42.0 / (PI * s)).sqrt().ceil() as i64 + 3;
    let mut t0 = 1.0;
    let mut t1 = 0.0;
    let mut t2 = 0.0;
    for k in 1..=k_max {
        let k2 = (k * k) as f64;
        let e = (-PI * k2 * s).exp();
        t0 += 2.0 * e;
        t1 += -2.0 * PI * k2 * e;
        t2 += 2.0 * PI * PI * k2 * k2 * e;
    }
    (t0, t1, t2)
}

/// θ₃ and derivatives; uses the modular relation `θ₃(s) = s^(-1/2) θ₃(1/s)`
/// (and its differentiated forms) for s < 1 so that ≤ 30 terms give ~1e-14
/// absolute accuracy uniformly.
pub fn theta3_all(s: f64) -> Result<Theta1DValue, SpecialError> {
    if !(s > 0.0) {
        return Err(SpecialError::NonPositiveArgument(s));
    }
    if s >= 1.0 {
        let (th, th1, th2) = theta3_direct_sums(s);
        Ok(Theta1DValue { s, th, th1, th2 })
    } else {
        let (a0, a1, a2) = theta3_direct_sums(1.0 / s);
        let th = s.powf(-0.5) * a0;
        let th1 = -0.5 * s.powf(-1.5) * a0 - s.powf(-2.5) * a1;
        let th2 = 0.75 * s.powf(-2.5) * a0 + 3.0 * s.powf(-3.5) * a1 + s.powf(-4.5) * a2;
        Ok(Theta1DValue { s, th, th1, th2 })
    }
}

/// θ₃ or one of its derivatives (`order` 0, 1 or 2).
pub fn theta3(s: f64, order: u32) -> Result<f64, SpecialError> {
    assert!(order <= 2);
    let v = theta3_all(s)?;
    Ok(match order {
        0 => v.th,
        1 => v.th1,
        _ => v.th2,
    })
}

/// Residual of the identity `s θ₃'(s)/θ₃(s) + (1/s) θ₃'(1/s)/θ₃(1/s) = -1/2`,
/// with both sides evaluated by direct summation (no modular shortcut).
pub fn fs1_residual(s: f64) -> f64 {
    let (t0a, t1a, _) = theta3_direct_sums(s);
    let (t0b, t1b, _) = theta3_direct_sums(1.0 / s);
    s * t1a / t0a + (1.0 / s) * t1b / t0b + 0.5
}

fn theta_direct(params: &LatticeParams, alpha: f64, tol: f64, max_points: u64) -> Result<f64, SpecialError> {
    Ok(1.0 + sums::gaussian_weight1_sum(params, alpha, tol, max_points)?.value)
}

/// Lattice theta function `θ_L(α) = Σ_{p ∈ L} e^(-α|p|²)` (the origin term
/// included).
///
/// Below the crossover `α < π V^(-2/3)` the sum is evaluated through Poisson
/// summation on the dual lattice, `θ_L(α) = V^(-1)(π/α)^(3/2) θ_{L*}(π²/α)`,
/// which is then in its rapidly converging regime.
pub fn theta_lattice(
    params: &LatticeParams,
    alpha: f64,
    cfg: &sums::SumConfig,
) -> Result<f64, SpecialError> {
    if !(alpha > 0.0) {
        return Err(SpecialError::NonPositiveArgument(alpha));
    }
    let crossover = PI * params.volume.powf(-2.0 / 3.0);
    if alpha >= crossover {
        theta_direct(params, alpha, cfg.target_tol, cfg.max_points)
    } else {
        let dual = params.dual();
        let scale = (PI / alpha).powf(1.5) / params.volume;
        let inner = theta_direct(&dual, PI * PI / alpha, cfg.target_tol / scale, cfg.max_points)?;
        Ok(scale * inner)
    }
}

/// Direct-branch theta regardless of crossover (for branch-consistency tests).
pub fn theta_lattice_direct(
    params: &LatticeParams,
    alpha: f64,
    cfg: &sums::SumConfig,
) -> Result<f64, SpecialError> {
    if !(alpha > 0.0) {
        return Err(SpecialError::NonPositiveArgument(alpha));
    }
    theta_direct(params, alpha, cfg.target_tol, cfg.max_points)
}

/// Relative residual of the Poisson identity
/// `Σ_L e^(-α|p|²) = V^(-1)(π/α)^(3/2) Σ_{L*} e^(-π²|q|²/α)`.
pub fn theta_poisson_residual(
    params: &LatticeParams,
    alpha: f64,
    cfg: &sums::SumConfig,
) -> Result<f64, SpecialError> {
    let lhs = theta_direct(params, alpha, cfg.target_tol, cfg.max_points)?;
    let dual = params.dual();
    let rhs = (PI / alpha).powf(1.5) / params.volume
        * theta_direct(&dual, PI * PI / alpha, cfg.target_tol, cfg.max_points)?;
    Ok((lhs - rhs).abs() / lhs.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsteinBackend {
    Direct,
    GammaAccelerated,
}

/// `S_M(σ) = Σ'_{w ∈ M} (π|w|²)^(-σ) Γ(σ, π|w|²)`, the exponentially
/// convergent half of the Mellin split.
fn incomplete_gamma_sum(
    params: &LatticeParams,
    sigma: f64,
    tol: f64,
    max_points: u64,
) -> Result<SumResult, SumError> {
    let c = params.c();
    sums::exponential_sum(params, tol, max_points, &mut |_, _, _, qt| {
        let x = PI * c * qt;
        x.powf(-sigma) * upper_gamma(sigma, x)
    })
}

/// Completed Epstein zeta `Λ_L(s) = π^(-s) Γ(s) ζ_L(2s)` evaluated by the
/// incomplete-gamma split of the Mellin integral at t = 1:
///
/// ```text
/// Λ_L(s) = -1/s + 1/(V(s - 3/2)) + S_L(s) + V^(-1) S_{L*}(3/2 - s),
/// ```
///
/// finite and analytic for all real s except 0 and 3/2; this is the analytic
/// continuation used below 3/2.
pub fn epstein_completed(
    params: &LatticeParams,
    s: f64,
    tol: f64,
    max_points: u64,
) -> Result<SumResult, SpecialError> {
    if (s - 1.5).abs() < 1e-12 {
        return Err(SpecialError::PoleAt3Halves);
    }
    if s.abs() < 1e-12 {
        return Err(SpecialError::InvalidArgument("completed zeta undefined at s = 0".into()));
    }
    let dual = params.dual();
    let part1 = incomplete_gamma_sum(params, s, tol / 3.0, max_points)?;
    let part2 = incomplete_gamma_sum(&dual, 1.5 - s, tol / 3.0, max_points)?;
    let v = params.volume;
    let value = -1.0 / s + 1.0 / (v * (s - 1.5)) + part1.value + part2.value / v;
    Ok(SumResult {
        value,
        est_error: part1.est_error + part2.est_error / v,
        points_used: part1.points_used + part2.points_used,
        converged: part1.converged && part2.converged,
    })
}

/// Accelerated `ζ_L(2s)` with error estimate (crate hook for the sum engine).
pub(crate) fn epstein_zeta_sumresult(
    params: &LatticeParams,
    two_s: f64,
    tol: f64,
    max_points: u64,
) -> Result<SumResult, SpecialError> {
    let s = 0.5 * two_s;
    let front = PI.powf(s) * recip_gamma(s);
    let lam = epstein_completed(params, s, tol / front.abs().max(1e-300), max_points)?;
    Ok(SumResult {
        value: front * lam.value,
        est_error: front.abs() * lam.est_error,
        points_used: lam.points_used,
        converged: lam.converged,
    })
}

/// Epstein zeta `ζ_L(2s) = Σ'_{p ∈ L} |p|^(-2s)`.
///
/// The direct backend needs `s > 3/2`; the accelerated backend is valid for
/// any `s ∉ {0, 3/2}` and provides the analytic continuation below 3/2.
pub fn epstein_zeta(
    params: &LatticeParams,
    two_s: f64,
    backend: EpsteinBackend,
    cfg: &sums::SumConfig,
) -> Result<f64, SpecialError> {
    let s = 0.5 * two_s;
    match backend {
        EpsteinBackend::Direct => {
            if s <= 1.5 {
                return Err(SpecialError::InvalidArgument(format!(
                    "direct summation requires s > 3/2 (got {s}); use the accelerated backend"
                )));
            }
            let c = params.c();
            let scale = c.powf(-s);
            let w = sums::Weight::one();
            let r = sums::reduced_power_sum(
                params,
                &w,
                s,
                cfg.target_tol / scale,
                sums::default_cutoff_growth(),
                cfg.max_points,
            )?;
            Ok(scale * r.value)
        }
        EpsteinBackend::GammaAccelerated => {
            Ok(epstein_zeta_sumresult(params, two_s, cfg.target_tol, cfg.max_points)?.value)
        }
    }
}

fn min_q(params: &LatticeParams) -> f64 {
    let mut q = f64::INFINITY;
    for m in -4..=4i64 {
        for n in -4..=4i64 {
            for p in -4..=4i64 {
                if (m, n, p) != (0, 0, 0) {
                    q = q.min(params.quadratic_form(m, n, p));
                }
            }
        }
    }
    q
}

fn adaptive_simpson(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &mut dyn FnMut(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 26)
}

/// Independent evaluation of `Λ_L(s)` (s > 3/2) by numerical quadrature of
/// the Mellin integral `∫_0^∞ t^(s-1) (θ_L(πt) - 1) dt`: adaptive Simpson on
/// the bulk, the small-t endcap transformed to the dual lattice analytically.
///
/// Shares no code path with [`epstein_completed`] beyond theta evaluation,
/// so comparing the two is a genuine consistency check of the
/// incomplete-gamma machinery and of the dual-lattice geometry.
pub fn epstein_completed_quadrature(
    params: &LatticeParams,
    s: f64,
    tol: f64,
) -> Result<f64, SpecialError> {
    if s <= 1.5 {
        return Err(SpecialError::InvalidArgument(
            "quadrature route requires s > 3/2".into(),
        ));
    }
    let cfg = sums::SumConfig::gaussian().with_tol(1e-15);
    let eps = 0.3f64;
    let qmin = min_q(params);
    let dual = params.dual();
    let qmin_dual = min_q(&dual);
    let t_hi = (44.0 / (PI * qmin)).max(eps * 2.0);
    let mut psi = |t: f64| -> f64 {
        let th = theta_lattice(params, PI * t, &cfg).expect("theta in quadrature");
        t.powf(s - 1.0) * (th - 1.0)
    };
    let bulk = adaptive_simpson(&mut psi, eps, t_hi, tol / 4.0);
    // ∫_0^ε t^(s-1)ψ_L = V⁻¹∫_{1/ε}^∞ τ^(1/2-s)ψ_{L*} + V⁻¹ε^(s-3/2)/(s-3/2) - ε^s/s
    let tau_lo = 1.0 / eps;
    let tau_hi = tau_lo + 44.0 / (PI * qmin_dual);
    let mut psi_dual = |tau: f64| -> f64 {
        let th = theta_lattice(&dual, PI * tau, &cfg).expect("dual theta in quadrature");
        tau.powf(0.5 - s) * (th - 1.0)
    };
    let j = adaptive_simpson(&mut psi_dual, tau_lo, tau_hi, tol / 4.0);
    let v = params.volume;
    Ok(bulk + j / v + eps.powf(s - 1.5) / (v * (s - 1.5)) - eps.powf(s) / s)
}

/// Relative residual of the functional equation
/// `π^(-s) Γ(s) ζ_L(2s) = V^(-1) π^(-(3/2-s)) Γ(3/2-s) ζ_{L*}(3-2s)`
/// for `s > 3/2`. The left side is evaluated by quadrature, the right side in
/// completed form through the incomplete-gamma split (the completed form is
/// used because `Γ(3/2-s)` has poles at `s = 5/2, 7/2, …` while the product
/// stays finite). For unimodular lattices (V = 1) this is the classical
/// statement of the functional equation.
pub fn zeta_functional_equation_residual(
    params: &LatticeParams,
    s: f64,
    tol: f64,
) -> Result<f64, SpecialError> {
    let lhs = epstein_completed_quadrature(params, s, tol)?;
    let dual = params.dual();
    let rhs = epstein_completed(&dual, 1.5 - s, tol, 400_000_000)?.value / params.volume;
    Ok((lhs - rhs).abs() / lhs.abs())
}

/// The FCC shell Dirichlet series `Σ_{R ≥ 1} R^(-s)` (the Epstein zeta of the
/// FCC lattice scaled so that its quadratic form is exactly `R`), through the
/// accelerated backend.
pub fn r_dirichlet(s: f64, tol: f64) -> Result<f64, SpecialError> {
    let form_r = LatticeParams::fcc_form_r();
    Ok(epstein_zeta_sumresult(&form_r, 2.0 * s, tol, 400_000_000)?.value)
}

/// Same series summed by explicit shells with geometric tail extrapolation
/// (cross-check route for [`r_dirichlet`]); needs `s > 3/2`.
pub fn r_dirichlet_shells(s: f64, t_max: u32) -> f64 {
    let table = shell_table(t_max);
    let mut acc = crate::sums::kahan::NeumaierSum::new();
    for t in 1..=t_max as usize {
        if table.count[t] > 0 {
            acc.add(table.count[t] as f64 * (t as f64).powf(-s));
        }
    }
    acc.value()
}

/// `Y(s) = Σ' T(m,n,p) / R(m,n,p)^(s+2)` by shells, in the Abel (summation by
/// parts) form `Σ_{t≥2} A(t) (t^(-s-2) - (t+1)^(-s-2))` whose terms are all
/// positive. The shell cutoff doubles until the geometric extrapolation
/// stabilizes; converges for `s > 3/2` (below that the truncated value is
/// returned with `converged = false`).
pub fn y_function(s: f64, tol: f64) -> Result<SumResult, SpecialError> {
    if !(s > 0.0) {
        return Err(SpecialError::NonPositiveArgument(s));
    }
    let ratio = 2f64.powf(1.5 - s); // per-doubling increment ratio, A(t) ~ t^(5/2)
    let mut t_max = 512u32;
    let mut prev_raw: Option<f64> = None;
    let mut prev_extrap: Option<f64> = None;
    let mut points = 0u64;
    loop {
        let raw = y_truncated(s, t_max);
        points += t_max as u64;
        let (value, est) = match prev_raw {
            None => (raw, f64::INFINITY),
            Some(last) => {
                let delta = raw - last;
                let extrap = if ratio < 0.95 { raw + delta * ratio / (1.0 - ratio) } else { raw };
                let est = match prev_extrap {
                    None => f64::INFINITY,
                    Some(pe) => (extrap - pe).abs().max(1e-16 * raw.abs()),
                };
                prev_extrap = Some(extrap);
                (extrap, est)
            }
        };
        prev_raw = Some(raw);
        if est <= tol {
            return Ok(SumResult { value, est_error: est, points_used: points, converged: true });
        }
        if t_max >= 1 << 16 {
            return Ok(SumResult {
                value,
                est_error: est.min(f64::MAX),
                points_used: points,
                converged: false,
            });
        }
        t_max *= 2;
    }
}

/// Truncated `Y` in Abel form at a fixed shell cutoff.
pub fn y_truncated(s: f64, t_max: u32) -> f64 {
    let table = shell_table(t_max);
    let mut acc = crate::sums::kahan::NeumaierSum::new();
    let mut a_cum: i128 = 0;
    for t in 1..t_max as usize {
        a_cum += table.t_sum[t] as i128;
        if a_cum != 0 {
            let tf = t as f64;
            acc.add(a_cum as f64 * (tf.powf(-s - 2.0) - (tf + 1.0).powf(-s - 2.0)));
        }
    }
    a_cum += table.t_sum[t_max as usize] as i128;
    acc.add(a_cum as f64 * (t_max as f64).powf(-s - 2.0));
    acc.value()
}

/// Direct shell form `Σ_t (A(t)-A(t-1)) t^(-s-2)` at a fixed cutoff; equals
/// [`y_truncated`] exactly (finite rearrangement).
pub fn y_truncated_shell_form(s: f64, t_max: u32) -> f64 {
    let table = shell_table(t_max);
    let mut acc = crate::sums::kahan::NeumaierSum::new();
    for t in 2..=t_max as usize {
        if table.t_sum[t] != 0 {
            acc.add(table.t_sum[t] as f64 * (t as f64).powf(-s - 2.0));
        }
    }
    acc.value()
}

/// `G(s) = s(s-3) ΣR^(-s) + 12 s(s+1) Y(s)`; positive for the exponent range
/// used by the stability thresholds.
pub fn g_function(s: f64, tol: f64) -> Result<f64, SpecialError> {
    let z = r_dirichlet(s, tol)?;
    let y = y_function(s, tol)?.value;
    Ok(s * (s - 3.0) * z + 12.0 * s * (s + 1.0) * y)
}

/// `H(s) = s(s-1) ΣR^(-s) - 4 s(s+1) Y(s)`.
pub fn h_function(s: f64, tol: f64) -> Result<f64, SpecialError> {
    let z = r_dirichlet(s, tol)?;
    let y = y_function(s, tol)?.value;
    Ok(s * (s - 1.0) * z - 4.0 * s * (s + 1.0) * y)
}

/// `G`, `H` and `Y` at one exponent (CLI convenience).
pub fn ghy(s: f64, tol: f64) -> Result<(f64, f64, f64), SpecialError> {
    let z = r_dirichlet(s, tol)?;
    let y = y_function(s, tol)?.value;
    Ok((
        s * (s - 3.0) * z + 12.0 * s * (s + 1.0) * y,
        s * (s - 1.0) * z - 4.0 * s * (s + 1.0) * y,
        y,
    ))
}

/// The three exponential shell sums entering the FCC Hessian for the Gaussian
/// potential: `A1 = Σ R² e^(-βR)`, `A2 = Σ R e^(-βR)`, `A3 = Σ T e^(-βR)`.
///
/// All three are positive, and `A1 > 4 A3` (pointwise `4|T| ≤ R²`).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralScalars {
    pub beta: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

pub fn spectral_scalars(beta: f64, t_max: u32) -> Result<SpectralScalars, SpecialError> {
    if !(beta > 0.0) {
        return Err(SpecialError::NonPositiveArgument(beta));
    }
    let table = shell_table(t_max);
    let mut a1 = crate::sums::kahan::NeumaierSum::new();
    let mut a2 = crate::sums::kahan::NeumaierSum::new();
    let mut a3 = crate::sums::kahan::NeumaierSum::new();
    for t in 1..=t_max as usize {
        let tf = t as f64;
        let e = (-beta * tf).exp();
        if table.count[t] > 0 {
            a1.add(table.count[t] as f64 * tf * tf * e);
            a2.add(table.count[t] as f64 * tf * e);
        }
        if table.t_sum[t] != 0 {
            a3.add(table.t_sum[t] as f64 * e);
        }
    }
    Ok(SpectralScalars { beta, a1: a1.value(), a2: a2.value(), a3: a3.value() })
}

/// Shell cutoff giving ~1e-19 relative exponential tails at rate `beta`.
pub fn spectral_t_max(beta: f64) -> u32 {
    ((46.0 / beta).ceil() as u32).clamp(40, 20_000)
}
