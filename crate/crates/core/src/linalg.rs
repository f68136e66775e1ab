//! Small dense symmetric matrix helpers (fixed size, no allocation).

/// Eigenvalues of a symmetric `N×N` matrix by cyclic Jacobi rotations,
/// returned sorted ascending.
///
/// The input is only read from its upper triangle mirrored onto the lower
/// one; asymmetry below ~1e-12 relative is tolerated and symmetrized away.
pub fn symmetric_eigenvalues<const N: usize>(mat: &[[f64; N]; N]) -> [f64; N] {
    let mut a = *mat;
    // symmetrize; downstream assembly is symmetric up to rounding
    for i in 0..N {
        for j in (i + 1)..N {
            let m = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = m;
            a[j][i] = m;
        }
    }
    let scale: f64 = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..N {
            for j in (i + 1)..N {
                off = off.max(a[i][j].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig = [0.0f64; N];
    for i in 0..N {
        eig[i] = a[i][i];
    }
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

/// Lower-triangular Cholesky factor of a symmetric positive definite 3×3
/// matrix, or `None` if the matrix is not (numerically) positive definite.
pub fn cholesky3(g: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut l = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Inverse of a 3×3 matrix; `None` when `|det|` is below `tiny`.
pub fn invert3(m: &[[f64; 3]; 3], tiny: f64) -> Option<[[f64; 3]; 3]> {
    let det = det3(m);
    if det.abs() <= tiny {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut inv = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // cofactor expansion, transposed
            let (r0, r1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            inv[j][i] = sign * minor * inv_det;
        }
    }
    Some(inv)
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}
