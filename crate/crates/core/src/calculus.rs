//! Energies, analytic gradients and Hessians in the five moduli coordinates,
//! specialized closed forms at the cubic lattice points, and finite-difference
//! oracles.
//!
//! With `Q(m,n,p)` the quadratic form of [`LatticeParams`], the energy is
//! `E = Σ' f(Q)` and its derivatives follow from the chain rule:
//! `∂E/∂θ = Σ' (∂Q/∂θ) f'(Q)` and
//! `∂²E/∂θ∂φ = Σ' (∂Q/∂θ)(∂Q/∂φ) f''(Q) + (∂²Q/∂θ∂φ) f'(Q)`.
//! The `∂Q` coefficient polynomials are implemented once in `Shape` and fed
//! to the summation engine as tagged weights (tagging enables memoization of
//! the volume-independent reduced sums for power-law potentials).

use serde::Serialize;

use crate::lattice::LatticeParams;
use crate::potentials::{Potential, PotentialAtoms};
use crate::special::{self, SpecialError};
use crate::sums::{self, shell_table, SumConfig, SumError, SumResult, SumStrategy, Weight};

/// The five moduli axes, in canonical order `u, v, x, y, z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    U = 0,
    V = 1,
    X = 2,
    Y = 3,
    Z = 4,
}

pub const AXES: [Axis; 5] = [Axis::U, Axis::V, Axis::X, Axis::Y, Axis::Z];

pub fn axis_labels() -> [&'static str; 5] {
    ["u", "v", "x", "y", "z"]
}

/// Energy gradient with respect to `(u, v, x, y, z)` at fixed volume.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Gradient5 {
    pub du: f64,
    pub dv: f64,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl Gradient5 {
    pub fn as_array(&self) -> [f64; 5] {
        [self.du, self.dv, self.dx, self.dy, self.dz]
    }

    pub fn norm_inf(&self) -> f64 {
        self.as_array().iter().fold(0.0f64, |a, &x| a.max(x.abs()))
    }
}

/// Symmetric 5×5 matrix of second partials, indexed in `(u, v, x, y, z)` order.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Hessian5 {
    pub mat: [[f64; 5]; 5],
}

impl Hessian5 {
    pub fn zero() -> Self {
        Self { mat: [[0.0; 5]; 5] }
    }

    pub fn entry(&self, i: Axis, j: Axis) -> f64 {
        self.mat[i as usize][j as usize]
    }

    pub fn set(&mut self, i: Axis, j: Axis, value: f64) {
        self.mat[i as usize][j as usize] = value;
        self.mat[j as usize][i as usize] = value;
    }

    pub fn eigenvalues(&self) -> [f64; 5] {
        crate::linalg::symmetric_eigenvalues(&self.mat)
    }

    /// Max entrywise deviation against `other`, relative to the largest
    /// absolute entry of either matrix (but at least `floor`).
    pub fn max_rel_deviation(&self, other: &Hessian5, floor: f64) -> f64 {
        let mut scale = floor;
        for i in 0..5 {
            for j in 0..5 {
                scale = scale.max(self.mat[i][j].abs()).max(other.mat[i][j].abs());
            }
        }
        let mut dev = 0.0f64;
        for i in 0..5 {
            for j in 0..5 {
                dev = dev.max((self.mat[i][j] - other.mat[i][j]).abs() / scale);
            }
        }
        dev
    }
}

/// The `∂Q/∂θ` and `∂²Q/∂θ∂φ` coefficient polynomials (divided by `C`).
#[derive(Clone, Copy)]
struct Shape {
    u: f64,
    v: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Shape {
    fn of(params: &LatticeParams) -> Self {
        Self { u: params.u, v: params.v, x: params.x, y: params.y, z: params.z }
    }

    #[inline]
    fn lin(&self, m: i64, n: i64, p: i64) -> (f64, f64, f64) {
        let (mf, nf, pf) = (m as f64, n as f64, p as f64);
        (mf + self.x * nf + self.y * pf, nf + self.z * pf, pf)
    }

    /// `(∂Q/∂θ)/C`.
    #[inline]
    fn grad(&self, axis: Axis, m: i64, n: i64, p: i64) -> f64 {
        let (a, b, pf) = self.lin(m, n, p);
        let (u, v) = (self.u, self.v);
        match axis {
            Axis::U => -(a * a + v * v * b * b) / (u * u) + u * pf * pf / (v * v),
            Axis::V => 2.0 * v * b * b / u - u * u * pf * pf / (v * v * v),
            Axis::X => 2.0 * (n as f64) * a / u,
            Axis::Y => 2.0 * pf * a / u,
            Axis::Z => 2.0 * v * v * pf * b / u,
        }
    }

    /// `(∂²Q/∂θ∂φ)/C`; identically zero for (v,x), (v,y), (x,z), (y,z).
    #[inline]
    fn curv(&self, i: Axis, j: Axis, m: i64, n: i64, p: i64) -> f64 {
        use Axis::*;
        let (a, b, pf) = self.lin(m, n, p);
        let nf = n as f64;
        let (u, v) = (self.u, self.v);
        match (i, j) {
            (U, U) => 2.0 * (a * a + v * v * b * b) / (u * u * u) + pf * pf / (v * v),
            (V, V) => 2.0 * b * b / u + 3.0 * u * u * pf * pf / (v * v * v * v),
            (X, X) => 2.0 * nf * nf / u,
            (Y, Y) => 2.0 * pf * pf / u,
            (Z, Z) => 2.0 * v * v * pf * pf / u,
            (U, V) => -2.0 * (v * b * b / (u * u) + u * pf * pf / (v * v * v)),
            (U, X) => -2.0 * nf * a / (u * u),
            (U, Y) => -2.0 * pf * a / (u * u),
            (U, Z) => -2.0 * v * v * pf * b / (u * u),
            (V, Z) => 4.0 * v * pf * b / u,
            (X, Y) => 2.0 * nf * pf / u,
            _ => 0.0,
        }
    }
}

fn curv_vanishes(i: Axis, j: Axis) -> bool {
    use Axis::*;
    matches!((i, j), (V, X) | (V, Y) | (X, Z) | (Y, Z))
}

const TAG_GRAD: u64 = 1;
const TAG_PROD: u64 = 10;
const TAG_CURV: u64 = 40;
const TAG_CUBIC_P4: u64 = 100;
const TAG_CUBIC_N2P2: u64 = 101;
const TAG_CUBIC_P2: u64 = 102;

fn special_err(e: SpecialError) -> SumError {
    match e {
        SpecialError::Sum(inner) => inner,
        other => SumError::NotConvergent { reason: other.to_string() },
    }
}

/// `E_f[L] = Σ' f(Q)`. Gaussian potentials sum directly; power-law potentials
/// evaluate through the accelerated Epstein zeta backend per component.
pub fn energy(
    pot: &Potential,
    params: &LatticeParams,
    cfg: &SumConfig,
) -> Result<SumResult, SumError> {
    let strategy = match pot.atoms() {
        PotentialAtoms::Exponential { .. } => cfg.strategy,
        PotentialAtoms::Powers(_) => SumStrategy::GammaAccelerated,
    };
    sums::lattice_sum(params, &Weight::one(), pot, 0, &SumConfig { strategy, ..*cfg })
}

/// Analytic gradient `(∂_u E, ∂_v E, ∂_x E, ∂_y E, ∂_z E)`.
pub fn gradient(
    pot: &Potential,
    params: &LatticeParams,
    cfg: &SumConfig,
) -> Result<Gradient5, SumError> {
    let c = params.c();
    let shape = Shape::of(params);
    let mut out = [0.0f64; 5];
    for (k, axis) in AXES.iter().enumerate() {
        let eval = move |m, n, p| shape.grad(*axis, m, n, p);
        let w = Weight::tagged(2, TAG_GRAD + k as u64, &eval);
        out[k] = c * sums::lattice_sum(params, &w, pot, 1, cfg)?.value;
    }
    Ok(Gradient5 { du: out[0], dv: out[1], dx: out[2], dy: out[3], dz: out[4] })
}

/// Full analytic 5×5 Hessian from the chain-rule formulas. All 15 independent
/// entries are summed, including those that vanish at symmetric points.
pub fn hessian(
    pot: &Potential,
    params: &LatticeParams,
    cfg: &SumConfig,
) -> Result<Hessian5, SumError> {
    let c = params.c();
    let shape = Shape::of(params);
    let mut h = Hessian5::zero();
    for (ik, i) in AXES.iter().enumerate() {
        for (jk, j) in AXES.iter().enumerate().skip(ik) {
            let prod = move |m, n, p| shape.grad(*i, m, n, p) * shape.grad(*j, m, n, p);
            let wp = Weight::tagged(4, TAG_PROD + (ik * 5 + jk) as u64, &prod);
            let sp = sums::lattice_sum(params, &wp, pot, 2, cfg)?.value;
            let sc = if curv_vanishes(*i, *j) {
                0.0
            } else {
                let curv = move |m, n, p| shape.curv(*i, *j, m, n, p);
                let wc = Weight::tagged(2, TAG_CURV + (ik * 5 + jk) as u64, &curv);
                sums::lattice_sum(params, &wc, pot, 1, cfg)?.value
            };
            h.set(*i, *j, c * c * sp + c * sc);
        }
    }
    Ok(h)
}

/// FCC-point Hessian assembled from the three shell sums
/// `S_rr = Σ R² f''(CR)`, `S_r = Σ R f'(CR)`, `S_t = Σ T f''(CR)`:
///
/// ```text
/// ∂²uu =  C²/2·S_rr + 2C·S_r + 6C²·S_t          ∂²uv = -∂²uu
/// ∂²vv = 5C²/6·S_rr + 8C/3·S_r + 14C²/3·S_t
/// ∂²xx =  C²/3·S_rr +  C·S_r + 4C²/3·S_t
/// ∂²yy = ∂²zz = 2C²/3·S_rr + 4C/3·S_r - 8C²/3·S_t
/// ∂²xy = -C²/3·S_rr - 2C/3·S_r + 4C²/3·S_t
/// ```
///
/// with every other entry exactly zero. For power-law potentials the shell
/// sums reduce to `Σ R^(-s)` and `Y(s)`, so this is an independent route from
/// the generic ellipsoid enumeration of [`hessian`].
pub fn hessian_d3_closed(
    pot: &Potential,
    volume: f64,
    cfg: &SumConfig,
) -> Result<Hessian5, SumError> {
    let d3 = LatticeParams::fcc(volume);
    let c = d3.c();
    let (mut s_rr, mut s_r, mut s_t) = (0.0f64, 0.0f64, 0.0f64);
    match pot.atoms() {
        PotentialAtoms::Exponential { alpha } => {
            let beta = alpha * c;
            let t_max = special::spectral_t_max(beta);
            let table = shell_table(t_max);
            let mut rr = sums::kahan::NeumaierSum::new();
            let mut r1 = sums::kahan::NeumaierSum::new();
            let mut tt = sums::kahan::NeumaierSum::new();
            for t in 1..=t_max as usize {
                let tf = t as f64;
                let e = (-beta * tf).exp();
                if table.count[t] > 0 {
                    rr.add(table.count[t] as f64 * tf * tf * e);
                    r1.add(table.count[t] as f64 * tf * e);
                }
                if table.t_sum[t] != 0 {
                    tt.add(table.t_sum[t] as f64 * e);
                }
            }
            s_rr = alpha * alpha * rr.value();
            s_r = -alpha * r1.value();
            s_t = alpha * alpha * tt.value();
        }
        PotentialAtoms::Powers(terms) => {
            for term in terms {
                let s = term.exponent;
                let z = special::r_dirichlet(s, cfg.target_tol).map_err(special_err)?;
                let y = special::y_function(s, cfg.target_tol).map_err(special_err)?;
                if !y.converged {
                    return Err(SumError::NotConvergent {
                        reason: format!("Y({s}) did not converge to {:.1e}", cfg.target_tol),
                    });
                }
                s_rr += term.coeff * s * (s + 1.0) * c.powf(-s - 2.0) * z;
                s_r += term.coeff * (-s) * c.powf(-s - 1.0) * z;
                s_t += term.coeff * s * (s + 1.0) * c.powf(-s - 2.0) * y.value;
            }
        }
    }
    let mut h = Hessian5::zero();
    let uu = 0.5 * c * c * s_rr + 2.0 * c * s_r + 6.0 * c * c * s_t;
    h.set(Axis::U, Axis::U, uu);
    h.set(Axis::U, Axis::V, -uu);
    h.set(
        Axis::V,
        Axis::V,
        5.0 / 6.0 * c * c * s_rr + 8.0 / 3.0 * c * s_r + 14.0 / 3.0 * c * c * s_t,
    );
    h.set(Axis::X, Axis::X, c * c / 3.0 * s_rr + c * s_r + 4.0 / 3.0 * c * c * s_t);
    let yy = 2.0 / 3.0 * c * c * s_rr + 4.0 / 3.0 * c * s_r - 8.0 / 3.0 * c * c * s_t;
    h.set(Axis::Y, Axis::Y, yy);
    h.set(Axis::Z, Axis::Z, yy);
    h.set(
        Axis::X,
        Axis::Y,
        -c * c / 3.0 * s_rr - 2.0 / 3.0 * c * s_r + 4.0 / 3.0 * c * c * s_t,
    );
    Ok(h)
}

/// Simple-cubic-point Hessian assembled from the three cubic sums
/// `P1 = Σ (p⁴ - p²n²) f''(CI)`, `P2 = Σ n²p² f''(CI)`, `P3 = Σ p² f'(CI)`:
///
/// ```text
/// ∂²uu = 3·2^(-1/3)·C²·P1 + 3C·P3
/// ∂²vv = 2^(7/3)·C²·P1 + 2^(8/3)·C·P3
/// ∂²xx = ∂²yy = ∂²zz = 2^(4/3)·C²·P2 + 2^(2/3)·C·P3
/// ∂²uv = -3·C²·P1 - 3·2^(1/3)·C·P3
/// ```
///
/// and every other entry exactly zero. The `P3` coefficient of `∂²uu` (3) and
/// the `P1` coefficient of `∂²uv` (-3) are forced by the general second
/// derivative formulas and validated against finite differences below; as a
/// consequence `∂²vv = 2^(8/3)/3 · ∂²uu` at this point for every admissible
/// potential. [`crate::stability::lj_z3_thresholds`] deliberately keeps a
/// different, conventional coefficient set for its threshold definitions.
pub fn hessian_z3_closed(
    pot: &Potential,
    volume: f64,
    cfg: &SumConfig,
) -> Result<Hessian5, SumError> {
    let z3 = LatticeParams::cubic(volume);
    let c = z3.c();
    let w_p4 = |_m: i64, n: i64, p: i64| {
        let (nf, pf) = (n as f64, p as f64);
        pf * pf * pf * pf - pf * pf * nf * nf
    };
    let w_n2p2 = |_m: i64, n: i64, p: i64| {
        let (nf, pf) = (n as f64, p as f64);
        nf * nf * pf * pf
    };
    let w_p2 = |_m: i64, _n: i64, p: i64| (p * p) as f64;
    let p1 = sums::lattice_sum(&z3, &Weight::tagged(4, TAG_CUBIC_P4, &w_p4), pot, 2, cfg)?.value;
    let p2 = sums::lattice_sum(&z3, &Weight::tagged(4, TAG_CUBIC_N2P2, &w_n2p2), pot, 2, cfg)?.value;
    let p3 = sums::lattice_sum(&z3, &Weight::tagged(2, TAG_CUBIC_P2, &w_p2), pot, 1, cfg)?.value;

    let cbrt2 = 2f64.cbrt();
    let mut h = Hessian5::zero();
    h.set(Axis::U, Axis::U, 3.0 / cbrt2 * c * c * p1 + 3.0 * c * p3);
    h.set(
        Axis::V,
        Axis::V,
        2f64.powf(7.0 / 3.0) * c * c * p1 + 2f64.powf(8.0 / 3.0) * c * p3,
    );
    let xx = 2f64.powf(4.0 / 3.0) * c * c * p2 + 2f64.powf(2.0 / 3.0) * c * p3;
    h.set(Axis::X, Axis::X, xx);
    h.set(Axis::Y, Axis::Y, xx);
    h.set(Axis::Z, Axis::Z, xx);
    h.set(Axis::U, Axis::V, -3.0 * c * c * p1 - 3.0 * cbrt2 * c * p3);
    Ok(h)
}

/// The four cubic-lattice sums `h1(x) … h4(x)` entering the simple-cubic
/// volume thresholds for Lennard-Jones-type potentials:
///
/// ```text
/// h1 = 3(x+1)·S1 - 4·S2      h2 = (x+1)·S1 - S2
/// h3 = 2(x+1)·S3 - S2        h4 = -2(x+1)·S1 + 3·S2
/// ```
///
/// where `S1 = Σ'(p⁴-p²n²)/ρ^(2x+4)`, `S2 = Σ' p²/ρ^(2x+2)`,
/// `S3 = Σ' n²p²/ρ^(2x+4)` over the integer cube (`ρ² = m²+n²+p²`). These are
/// the conventional threshold combinations; see [`hessian_z3_closed`] for the
/// finite-difference-validated variant of the `uu`/`uv` rows.
pub fn lj_h_values(x: f64, cfg: &SumConfig) -> Result<(f64, f64, f64, f64), SumError> {
    if x <= 1.5 {
        return Err(SumError::NotConvergent {
            reason: format!("h sums need exponent > 3/2 (got {x})"),
        });
    }
    let (s1, s2, s3) = cubic_threshold_sums(x, cfg)?;
    Ok((
        3.0 * (x + 1.0) * s1 - 4.0 * s2,
        (x + 1.0) * s1 - s2,
        2.0 * (x + 1.0) * s3 - s2,
        -2.0 * (x + 1.0) * s1 + 3.0 * s2,
    ))
}

/// `S1`, `S2`, `S3` of [`lj_h_values`] (volume-independent).
pub fn cubic_threshold_sums(x: f64, cfg: &SumConfig) -> Result<(f64, f64, f64), SumError> {
    // Q = ρ² exactly on the unit-volume cubic lattice
    let z3 = LatticeParams::cubic(1.0);
    let w_p4 = |_m: i64, n: i64, p: i64| {
        let (nf, pf) = (n as f64, p as f64);
        pf * pf * pf * pf - pf * pf * nf * nf
    };
    let w_n2p2 = |_m: i64, n: i64, p: i64| {
        let (nf, pf) = (n as f64, p as f64);
        nf * nf * pf * pf
    };
    let w_p2 = |_m: i64, _n: i64, p: i64| (p * p) as f64;
    let pot_outer = Potential::InversePower { s: x + 2.0 };
    let pot_inner = Potential::InversePower { s: x + 1.0 };
    let s1 = sums::lattice_sum(&z3, &Weight::tagged(4, TAG_CUBIC_P4, &w_p4), &pot_outer, 0, cfg)?;
    let s3 = sums::lattice_sum(&z3, &Weight::tagged(4, TAG_CUBIC_N2P2, &w_n2p2), &pot_outer, 0, cfg)?;
    let s2 = sums::lattice_sum(&z3, &Weight::tagged(2, TAG_CUBIC_P2, &w_p2), &pot_inner, 0, cfg)?;
    Ok((s1.value, s2.value, s3.value))
}

pub(crate) fn bump(params: &LatticeParams, axis: Axis, delta: f64) -> LatticeParams {
    let mut p = *params;
    match axis {
        Axis::U => p.u += delta,
        Axis::V => p.v += delta,
        Axis::X => p.x += delta,
        Axis::Y => p.y += delta,
        Axis::Z => p.z += delta,
    }
    p
}

fn params_component(params: &LatticeParams, axis: Axis) -> f64 {
    match axis {
        Axis::U => params.u,
        Axis::V => params.v,
        Axis::X => params.x,
        Axis::Y => params.y,
        Axis::Z => params.z,
    }
}

/// Central-difference gradient of the energy (oracle for the analytic one).
///
/// `step` is relative: the bump on axis θ is `step · max(1, |θ|)`.
pub fn fd_gradient(
    pot: &Potential,
    params: &LatticeParams,
    cfg: &SumConfig,
    step: f64,
) -> Result<Gradient5, SumError> {
    let mut out = [0.0f64; 5];
    for (k, axis) in AXES.iter().enumerate() {
        let h = step * params_component(params, *axis).abs().max(1.0);
        let hi = energy(pot, &bump(params, *axis, h), cfg)?.value;
        let lo = energy(pot, &bump(params, *axis, -h), cfg)?.value;
        out[k] = (hi - lo) / (2.0 * h);
    }
    Ok(Gradient5 { du: out[0], dv: out[1], dx: out[2], dy: out[3], dz: out[4] })
}

/// Central-difference Hessian of the energy (oracle for the analytic one).
pub fn fd_hessian(
    pot: &Potential,
    params: &LatticeParams,
    cfg: &SumConfig,
    step: f64,
) -> Result<Hessian5, SumError> {
    let e0 = energy(pot, params, cfg)?.value;
    let mut h = Hessian5::zero();
    let steps: Vec<f64> = AXES
        .iter()
        .map(|a| step * params_component(params, *a).abs().max(1.0))
        .collect();
    for (ik, i) in AXES.iter().enumerate() {
        let hi = energy(pot, &bump(params, *i, steps[ik]), cfg)?.value;
        let lo = energy(pot, &bump(params, *i, -steps[ik]), cfg)?.value;
        h.set(*i, *i, (hi - 2.0 * e0 + lo) / (steps[ik] * steps[ik]));
        for (jk, j) in AXES.iter().enumerate().skip(ik + 1) {
            let pp = energy(pot, &bump(&bump(params, *i, steps[ik]), *j, steps[jk]), cfg)?.value;
            let pm = energy(pot, &bump(&bump(params, *i, steps[ik]), *j, -steps[jk]), cfg)?.value;
            let mp = energy(pot, &bump(&bump(params, *i, -steps[ik]), *j, steps[jk]), cfg)?.value;
            let mm = energy(pot, &bump(&bump(params, *i, -steps[ik]), *j, -steps[jk]), cfg)?.value;
            h.set(*i, *j, (pp - pm - mp + mm) / (4.0 * steps[ik] * steps[jk]));
        }
    }
    Ok(h)
}
