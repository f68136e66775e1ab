//! Bravais lattices of fixed volume in five moduli coordinates.
//!
//! A lattice of unit-cell volume `V` is parametrized by `(u, v, x, y, z)` with
//! `u, v > 0`. Its quadratic form (squared length of the lattice vector with
//! integer coordinates `(m, n, p)`) is
//!
//! ```text
//! Q(m,n,p) = (C/u) [ (m + x n + y p)² + v² (n + z p)² + (u³ / 2v²) p² ],
//! C = 2^(1/3) V^(2/3),
//! ```
//!
//! realized by the basis
//!
//! ```text
//! v1 = √C (1/√u, 0, 0),
//! v2 = √C (x/√u, v/√u, 0),
//! v3 = √C (y/√u, v z/√u, u/(v√2)),
//! ```
//!
//! whose determinant is exactly `V`. Energies depend only on Gram data, so
//! lattices are treated up to rotation/reflection: two parameter points are
//! "the same lattice" when their Gram matrices agree (entrywise), and they
//! generate the same lattice up to rotation when the Grams are related by a
//! unimodular change of basis (see [`LatticeParams::gram_equivalent`]).
//!
//! The parameter domain is not reduced to a fundamental domain; callers may
//! supply any `(u, v, x, y, z)` with `u, v > 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("degenerate basis: |det| = {det:.3e} below threshold {threshold:.3e}")]
    DegenerateBasis { det: f64, threshold: f64 },
    #[error("invalid lattice parameters: {0}")]
    InvalidParams(String),
}

/// The five moduli plus the unit-cell volume.
///
/// Serializes as `{u, v, x, y, z, V}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub u: f64,
    pub v: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    #[serde(rename = "V")]
    pub volume: f64,
}

/// Three basis vectors, rows of the basis matrix (length units `V^(1/3)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Basis3 {
    pub v1: [f64; 3],
    pub v2: [f64; 3],
    pub v3: [f64; 3],
}

/// Values of the ternary forms `I`, `R`, `T` at an integer triple.
///
/// `I = 2^(-1/3)(m²+n²+p²)` (cubic), `R = m²+n²+p²+mp+np` (FCC) and
/// `T = mn(m+p)(n+p)`. They satisfy `4|T| ≤ R²` for every triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormValue {
    pub m: i64,
    pub n: i64,
    pub p: i64,
    pub i: f64,
    pub r: f64,
    pub t: f64,
}

/// `R(m,n,p) = m² + n² + p² + mp + np` as an exact integer.
pub fn r_form(m: i64, n: i64, p: i64) -> i64 {
    m * m + n * n + p * p + m * p + n * p
}

/// `T(m,n,p) = mn(m+p)(n+p)` as an exact integer.
pub fn t_form(m: i64, n: i64, p: i64) -> i64 {
    m * n * (m + p) * (n + p)
}

/// `I`, `R`, `T` at a triple.
pub fn form_values(m: i64, n: i64, p: i64) -> FormValue {
    let rho2 = (m * m + n * n + p * p) as f64;
    FormValue {
        m,
        n,
        p,
        i: rho2 / 2f64.cbrt(),
        r: r_form(m, n, p) as f64,
        t: t_form(m, n, p) as f64,
    }
}

impl LatticeParams {
    pub fn new(u: f64, v: f64, x: f64, y: f64, z: f64, volume: f64) -> Result<Self, LatticeError> {
        let all_finite = [u, v, x, y, z, volume].iter().all(|t| t.is_finite());
        if !all_finite {
            return Err(LatticeError::InvalidParams("non-finite field".into()));
        }
        if u <= 0.0 || v <= 0.0 || volume <= 0.0 {
            return Err(LatticeError::InvalidParams(format!(
                "require u > 0, v > 0, V > 0 (got u={u}, v={v}, V={volume})"
            )));
        }
        Ok(Self { u, v, x, y, z, volume })
    }

    /// Simple cubic lattice of volume `volume`: `(2^(1/3), 1, 0, 0, 0)`.
    pub fn cubic(volume: f64) -> Self {
        Self { u: 2f64.cbrt(), v: 1.0, x: 0.0, y: 0.0, z: 0.0, volume }
    }

    /// FCC lattice of volume `volume`: `(1, 1, 0, 1/2, 1/2)`.
    pub fn fcc(volume: f64) -> Self {
        Self { u: 1.0, v: 1.0, x: 0.0, y: 0.5, z: 0.5, volume }
    }

    /// BCC lattice of volume `volume`: `(2^(-1/3), 1, 0, 1/2, 1/2)`.
    ///
    /// These are the parameters recovered from the axis-aligned BCC basis
    /// `a(1,0,0), a(0,1,0), a(1/2,1/2,1/2)` with `a³ = 2·volume`; the same
    /// lattice is produced (up to a unimodular change of basis) by
    /// `Self::fcc(1/volume).dual()`.
    pub fn bcc(volume: f64) -> Self {
        Self { u: 0.5f64.cbrt(), v: 1.0, x: 0.0, y: 0.5, z: 0.5, volume }
    }

    /// FCC shape scaled so that the quadratic form equals `R` exactly
    /// (`C = 1`, i.e. volume `2^(-1/2)`).
    pub fn fcc_form_r() -> Self {
        Self::fcc(0.5f64.sqrt())
    }

    /// `C = 2^(1/3) V^(2/3)`, the length² scale of the parametrization.
    pub fn c(&self) -> f64 {
        (2.0 * self.volume * self.volume).cbrt()
    }

    /// The quadratic form `Q(m,n,p)`, i.e. `|m v1 + n v2 + p v3|²`.
    pub fn quadratic_form(&self, m: i64, n: i64, p: i64) -> f64 {
        self.c() * self.reduced_form(m, n, p)
    }

    /// `Q(m,n,p) / C`; depends on `(u,v,x,y,z)` only, not on the volume.
    pub fn reduced_form(&self, m: i64, n: i64, p: i64) -> f64 {
        let (mf, nf, pf) = (m as f64, n as f64, p as f64);
        let a = mf + self.x * nf + self.y * pf;
        let b = nf + self.z * pf;
        (a * a + self.v * self.v * b * b) / self.u
            + self.u * self.u / (2.0 * self.v * self.v) * pf * pf
    }

    /// Diagonal coefficients of the reduced form (used for enumeration scaling).
    pub(crate) fn reduced_diag(&self) -> [f64; 3] {
        [
            1.0 / self.u,
            (self.x * self.x + self.v * self.v) / self.u,
            (self.y * self.y + self.v * self.v * self.z * self.z) / self.u
                + self.u * self.u / (2.0 * self.v * self.v),
        ]
    }

    /// The generating basis; `det = V` exactly (up to rounding).
    pub fn basis(&self) -> Basis3 {
        let sc = self.c().sqrt();
        let su = self.u.sqrt();
        Basis3 {
            v1: [sc / su, 0.0, 0.0],
            v2: [sc * self.x / su, sc * self.v / su, 0.0],
            v3: [
                sc * self.y / su,
                sc * self.v * self.z / su,
                sc * self.u / (self.v * 2f64.sqrt()),
            ],
        }
    }

    /// Gram matrix of the generating basis (closed form).
    pub fn gram(&self) -> [[f64; 3]; 3] {
        let c = self.c();
        let (u, v, x, y, z) = (self.u, self.v, self.x, self.y, self.z);
        let g11 = c / u;
        let g12 = c * x / u;
        let g13 = c * y / u;
        let g22 = c * (x * x + v * v) / u;
        let g23 = c * (x * y + v * v * z) / u;
        let g33 = c * (y * y + v * v * z * z) / u + c * u * u / (2.0 * v * v);
        [[g11, g12, g13], [g12, g22, g23], [g13, g23, g33]]
    }

    /// Parameters of the dual lattice `L*` (volume `1/V`).
    ///
    /// The dual basis is the inverse transpose of the generating basis, so
    /// `dual(dual(P))` has the same Gram matrix as `P`. Since the moduli of a
    /// lattice are only unique up to a unimodular change of basis, the returned
    /// point need not be the conventional one for symmetric lattices (e.g. the
    /// dual of [`Self::fcc`] is [`Self::bcc`] only up to
    /// [`Self::gram_equivalent`]).
    pub fn dual(&self) -> Self {
        let b = self.basis().matrix();
        // rows of (B^T)^{-1} are the dual vectors
        let bt = transpose(&b);
        let w = linalg::invert3(&bt, 0.0).expect("valid params have nonsingular basis");
        Basis3::from_matrix(&w)
            .params()
            .expect("dual basis of a valid lattice is nondegenerate")
    }

    /// Same lattice up to rotation/reflection: searches small unimodular
    /// changes of basis `U` with `U G U^T` matching `other`'s Gram to `tol`
    /// (relative to the Gram scale).
    pub fn gram_equivalent(&self, other: &Self, tol: f64) -> bool {
        let ga = self.gram();
        let gb = other.gram();
        let scale = gb.iter().flatten().fold(0.0f64, |a, &x| a.max(x.abs()));
        let abs_tol = tol * scale;
        let Some(l) = linalg::cholesky3(&ga) else {
            return false;
        };
        let cand = |target: f64| vectors_with_norm(&ga, &l, target, abs_tol);
        let c1 = cand(gb[0][0]);
        let c2 = cand(gb[1][1]);
        let c3 = cand(gb[2][2]);
        let dot = |a: &[i64; 3], b: &[i64; 3]| {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += (a[i] * b[j]) as f64 * ga[i][j];
                }
            }
            s
        };
        for r1 in &c1 {
            for r2 in &c2 {
                if (dot(r1, r2) - gb[0][1]).abs() > abs_tol {
                    continue;
                }
                for r3 in &c3 {
                    if (dot(r1, r3) - gb[0][2]).abs() > abs_tol {
                        continue;
                    }
                    if (dot(r2, r3) - gb[1][2]).abs() > abs_tol {
                        continue;
                    }
                    let det = r1[0] * (r2[1] * r3[2] - r2[2] * r3[1])
                        - r1[1] * (r2[0] * r3[2] - r2[2] * r3[0])
                        + r1[2] * (r2[0] * r3[1] - r2[1] * r3[0]);
                    if det.abs() == 1 {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Max absolute entrywise difference of the two Gram matrices.
    pub fn gram_distance(&self, other: &Self) -> f64 {
        let ga = self.gram();
        let gb = other.gram();
        let mut d = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((ga[i][j] - gb[i][j]).abs());
            }
        }
        d
    }

    pub fn with_volume(mut self, volume: f64) -> Self {
        self.volume = volume;
        self
    }
}

/// Integer vectors `c` with `c G c^T = target ± abs_tol`, enumerated inside
/// the ellipsoid `Q(c) ≤ target + abs_tol` via the Cholesky factor.
fn vectors_with_norm(
    g: &[[f64; 3]; 3],
    l: &[[f64; 3]; 3],
    target: f64,
    abs_tol: f64,
) -> Vec<[i64; 3]> {
    let lambda = target + abs_tol;
    let mut out = Vec::new();
    if lambda <= 0.0 {
        return out;
    }
    let quad = |c: &[i64; 3]| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += (c[i] * c[j]) as f64 * g[i][j];
            }
        }
        s
    };
    // |w|² = |L^T c|² with w3 = l33 c3, so the ranges nest triangularly.
    let b3 = (lambda.sqrt() / l[2][2]).floor() as i64;
    for c3 in -b3..=b3 {
        let w3 = l[2][2] * c3 as f64;
        let rem2 = lambda - w3 * w3;
        if rem2 < 0.0 {
            continue;
        }
        // w2 = l22 c2 + l32 c3
        let mid2 = -l[2][1] * c3 as f64 / l[1][1];
        let half2 = rem2.sqrt() / l[1][1];
        for c2 in (mid2 - half2).ceil() as i64..=(mid2 + half2).floor() as i64 {
            let w2 = l[1][1] * c2 as f64 + l[2][1] * c3 as f64;
            let rem1 = rem2 - w2 * w2;
            if rem1 < 0.0 {
                continue;
            }
            let mid1 = -(l[1][0] * c2 as f64 + l[2][0] * c3 as f64) / l[0][0];
            let half1 = rem1.sqrt() / l[0][0];
            for c1 in (mid1 - half1).ceil() as i64..=(mid1 + half1).floor() as i64 {
                let c = [c1, c2, c3];
                if c == [0, 0, 0] {
                    continue;
                }
                if (quad(&c) - target).abs() <= abs_tol {
                    out.push(c);
                }
            }
        }
    }
    out
}

fn transpose(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

impl Basis3 {
    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Self {
        Self { v1: m[0], v2: m[1], v3: m[2] }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        [self.v1, self.v2, self.v3]
    }

    pub fn det(&self) -> f64 {
        linalg::det3(&self.matrix())
    }

    pub fn gram(&self) -> [[f64; 3]; 3] {
        let rows = self.matrix();
        let mut g = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = rows[i][0] * rows[j][0] + rows[i][1] * rows[j][1] + rows[i][2] * rows[j][2];
            }
        }
        g
    }

    /// Recover moduli from the basis by Gram matching.
    ///
    /// The recovery is the closed-form triangular solve
    /// `u = C/G11`, `x = u G12 / C`, `v² = u G22 / C − x²`, `y = u G13 / C`,
    /// `z = (u G23 / C − x y) / v²`, with `C` fixed by `det = V`. The result
    /// generates the same lattice as `self` up to rotation/reflection, and
    /// `basis(params).params() == params` to ~1e-10.
    pub fn params(&self) -> Result<LatticeParams, LatticeError> {
        let det = self.det();
        let scale = self
            .matrix()
            .iter()
            .map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
            .fold(0.0f64, f64::max);
        let threshold = 1e-12 * scale * scale * scale;
        if det.abs() <= threshold {
            return Err(LatticeError::DegenerateBasis { det: det.abs(), threshold });
        }
        let volume = det.abs();
        let c = (2.0 * volume * volume).cbrt();
        let g = self.gram();
        let u = c / g[0][0];
        let x = u * g[0][1] / c;
        let v2 = u * g[1][1] / c - x * x;
        if v2 <= 0.0 {
            return Err(LatticeError::DegenerateBasis { det: det.abs(), threshold });
        }
        let v = v2.sqrt();
        let y = u * g[0][2] / c;
        let z = (u * g[1][2] / c - x * y) / v2;
        LatticeParams::new(u, v, x, y, z, volume)
    }
}
