//! The weight identities of the FCC form under its automorph group.
//!
//! For any `F` with convergent sums, each listed polynomial weight satisfies
//! `Σ' lhs(m,n,p) F(R) = Σ' (a·R² + b·T + c·R) F(R)`. Because every automorph
//! preserves `R`, the identities hold shell by shell, hence exactly on
//! shell-truncated sums (up to accumulation rounding).

use super::shells::{r_shell_sum, shell_table};
use serde::Serialize;

type WeightFn = fn(i64, i64, i64) -> f64;

/// One identity: `Σ lhs·F(R) = Σ (r2·R² + t·T + r·R)·F(R)`.
pub struct AutomorphIdentity {
    pub name: &'static str,
    pub lhs: WeightFn,
    /// Coefficients (r², T, R) of the right-hand side.
    pub rhs: (f64, f64, f64),
}

fn aux(n: i64, p: i64) -> i64 {
    4 * n * n + 4 * n * p - p * p
}

pub const IDENTITIES: [AutomorphIdentity; 19] = [
    AutomorphIdentity {
        name: "aut1",
        lhs: |_m, n, p| aux(n, p) as f64,
        rhs: (0.0, 0.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut2",
        lhs: |m, n, p| (n * (2 * m + p)) as f64,
        rhs: (0.0, 0.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut3",
        lhs: |m, _n, p| (p * (2 * m + p)) as f64,
        rhs: (0.0, 0.0, 0.0),
    },
    // the weight here is p(2n+p), the one whose vanishing kills the
    // z-derivative at the FCC point (n(2n+p) does not sum to zero: its
    // first-shell sum is 8)
    AutomorphIdentity {
        name: "aut4",
        lhs: |_m, n, p| (p * (2 * n + p)) as f64,
        rhs: (0.0, 0.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut5",
        lhs: |_m, _n, p| (p * p) as f64,
        rhs: (0.0, 0.0, 2.0 / 3.0),
    },
    AutomorphIdentity {
        name: "aut6",
        lhs: |_m, n, p| (aux(n, p) * aux(n, p)) as f64,
        rhs: (10.0 / 3.0, 56.0 / 3.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut7",
        lhs: |_m, n, _p| (n * n) as f64,
        rhs: (0.0, 0.0, 1.0 / 2.0),
    },
    AutomorphIdentity {
        name: "aut8",
        lhs: |m, n, p| (n * n * (2 * m + p) * (2 * m + p)) as f64,
        rhs: (1.0 / 3.0, 4.0 / 3.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut9",
        lhs: |m, _n, p| (p * p * (2 * m + p) * (2 * m + p)) as f64,
        rhs: (2.0 / 3.0, -8.0 / 3.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut10",
        lhs: |_m, n, p| (p * p * (2 * n + p) * (2 * n + p)) as f64,
        rhs: (2.0 / 3.0, -8.0 / 3.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut11",
        lhs: |m, n, p| (n * (2 * m + p) * aux(n, p)) as f64,
        rhs: (0.0, 0.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut12",
        lhs: |m, n, p| (p * (2 * m + p) * aux(n, p)) as f64,
        rhs: (0.0, 0.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut13",
        lhs: |_m, n, p| (p * (2 * n + p) * aux(n, p)) as f64,
        rhs: (0.0, 0.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut14",
        lhs: |_m, n, p| (n * p) as f64,
        rhs: (0.0, 0.0, -1.0 / 3.0),
    },
    AutomorphIdentity {
        name: "aut15",
        lhs: |m, n, p| (n * p * (2 * m + p) * (2 * m + p)) as f64,
        rhs: (-1.0 / 3.0, 4.0 / 3.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut16",
        lhs: |m, n, p| (n * p * (2 * m + p) * (2 * n + p)) as f64,
        rhs: (0.0, 0.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut17",
        lhs: |m, n, p| (p * p * (2 * m + p) * (2 * n + p)) as f64,
        rhs: (0.0, 0.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut18",
        lhs: |_m, _n, p| {
            let pf = p as f64;
            pf * pf * pf * pf
        },
        rhs: (2.0 / 3.0, 8.0 / 3.0, 0.0),
    },
    AutomorphIdentity {
        name: "aut19",
        lhs: |_m, n, p| ((p * p) as f64) * (aux(n, p) as f64),
        rhs: (-2.0 / 3.0, -8.0, 0.0),
    },
];

/// Both sides of one identity evaluated on `F(R) = e^(-βR)` over shells
/// `R ≤ t_max`.
#[derive(Debug, Clone, Serialize)]
pub struct AutomorphCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub residual_abs: f64,
    pub residual_rel: f64,
}

/// Evaluate the 19 identities at decay rate `beta` on shells `R ≤ t_max`.
pub fn automorph_checks(beta: f64, t_max: u32) -> Vec<AutomorphCheck> {
    let table = shell_table(t_max);
    let f = |t: f64| (-beta * t).exp();
    // the three right-hand-side base sums
    let mut sum_r2 = 0.0f64;
    let mut sum_r = 0.0f64;
    let mut sum_t = 0.0f64;
    for t in 1..=t_max as usize {
        let tf = t as f64;
        let e = f(tf);
        sum_r2 += table.count[t] as f64 * tf * tf * e;
        sum_r += table.count[t] as f64 * tf * e;
        sum_t += table.t_sum[t] as f64 * e;
    }
    IDENTITIES
        .iter()
        .map(|id| {
            let lhs = r_shell_sum(t_max, id.lhs, f);
            let rhs = id.rhs.0 * sum_r2 + id.rhs.1 * sum_t + id.rhs.2 * sum_r;
            let residual_abs = (lhs - rhs).abs();
            let scale = lhs.abs().max(rhs.abs());
            let residual_rel = if scale > 0.0 { residual_abs / scale } else { 0.0 };
            AutomorphCheck { name: id.name, lhs, rhs, residual_abs, residual_rel }
        })
        .collect()
}
