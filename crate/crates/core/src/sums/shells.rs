//! Exact enumeration of the FCC form `R(m,n,p) = m²+n²+p²+mp+np` by shells.
//!
//! `R` takes nonnegative integer values on integer triples, so sums of the
//! form `Σ weight(m,n,p) · F(R)` can be grouped by the exact shell value
//! `t = R`. The automorph group of `R` maps each shell onto itself, which
//! makes the weight identities of `Σ w F(R)` hold exactly on truncated sums
//! when the truncation is by shell.
//!
//! Coordinate bound: from `R = (m+p/2)² + (n+p/2)² + p²/2` every triple with
//! `R ≤ t` satisfies `|p| ≤ √(2t)` and `|m|, |n| ≤ √t + √(2t)/2 ≤ 2√t`; the
//! loops below use the (tighter) nested ranges and an exact integer check.

use std::sync::{Arc, OnceLock, RwLock};

use crate::lattice::{r_form, t_form};

use super::kahan::NeumaierSum;

/// Visit every integer triple with `1 ≤ R(m,n,p) ≤ t_max`, in deterministic
/// `(p, m, n)` ascending order. The callback also receives `R`.
pub fn for_each_r_triple(t_max: u32, mut visit: impl FnMut(i64, i64, i64, u32)) {
    let t = t_max as f64;
    let p_max = (2.0 * t).sqrt().floor() as i64 + 1;
    for p in -p_max..=p_max {
        let rem_p = t - 0.5 * (p * p) as f64;
        if rem_p < -0.5 {
            continue;
        }
        let s = rem_p.max(0.0).sqrt();
        let m_lo = (-0.5 * p as f64 - s).floor() as i64;
        let m_hi = (-0.5 * p as f64 + s).ceil() as i64;
        for m in m_lo..=m_hi {
            let used = (m as f64 + 0.5 * p as f64).powi(2);
            let rem_m = (rem_p - used).max(0.0);
            let sn = rem_m.sqrt();
            let n_lo = (-0.5 * p as f64 - sn).floor() as i64;
            let n_hi = (-0.5 * p as f64 + sn).ceil() as i64;
            for n in n_lo..=n_hi {
                let r = r_form(m, n, p);
                if r >= 1 && r <= t_max as i64 {
                    visit(m, n, p, r as u32);
                }
            }
        }
    }
}

/// Per-shell weight sums `W[t] = Σ_{R(m,n,p)=t} weight(m,n,p)` for `t ≤ t_max`.
///
/// Integer-valued weights below 2^53 sum exactly.
pub fn r_shell_weight_sums(t_max: u32, weight: impl Fn(i64, i64, i64) -> f64) -> Vec<f64> {
    let mut sums = vec![0.0f64; t_max as usize + 1];
    for_each_r_triple(t_max, |m, n, p, r| {
        sums[r as usize] += weight(m, n, p);
    });
    sums
}

/// `Σ_{1 ≤ R ≤ t_max} weight(m,n,p) · f(R)`, accumulated shell by shell in
/// ascending `t` with compensated summation.
pub fn r_shell_sum(t_max: u32, weight: impl Fn(i64, i64, i64) -> f64, f: impl Fn(f64) -> f64) -> f64 {
    let sums = r_shell_weight_sums(t_max, weight);
    let mut acc = NeumaierSum::new();
    for (t, w) in sums.iter().enumerate().skip(1) {
        if *w != 0.0 {
            acc.add(*w * f(t as f64));
        }
    }
    acc.value()
}

/// `A(t) = Σ_{R(m,n,p) ≤ t} T(m,n,p)`, exactly.
pub fn cumulative_t(t: u32) -> f64 {
    let table = shell_table(t);
    let mut acc: i128 = 0;
    for shell in 1..=t as usize {
        acc += table.t_sum[shell] as i128;
    }
    acc as f64
}

/// Cached per-shell statistics: triple counts and exact `Σ T` per shell.
#[derive(Debug)]
pub struct ShellTable {
    pub t_max: u32,
    /// `count[t]` = number of triples with `R = t`.
    pub count: Vec<u32>,
    /// `t_sum[t]` = `Σ_{R=t} T(m,n,p)`, exact.
    pub t_sum: Vec<i64>,
}

impl ShellTable {
    fn build(t_max: u32) -> Self {
        let mut count = vec![0u32; t_max as usize + 1];
        let mut t_sum = vec![0i64; t_max as usize + 1];
        for_each_r_triple(t_max, |m, n, p, r| {
            count[r as usize] += 1;
            t_sum[r as usize] += t_form(m, n, p);
        });
        Self { t_max, count, t_sum }
    }
}

static SHELL_TABLE: OnceLock<RwLock<Arc<ShellTable>>> = OnceLock::new();

/// Shared shell table covering at least `min_t_max`; grows on demand
/// (idempotent under concurrent fill, safe for concurrent readers).
pub fn shell_table(min_t_max: u32) -> Arc<ShellTable> {
    let lock = SHELL_TABLE.get_or_init(|| RwLock::new(Arc::new(ShellTable::build(512))));
    {
        let table = lock.read().unwrap();
        if table.t_max >= min_t_max {
            return Arc::clone(&table);
        }
    }
    let mut table = lock.write().unwrap();
    if table.t_max < min_t_max {
        *table = Arc::new(ShellTable::build(min_t_max.next_power_of_two()));
    }
    Arc::clone(&table)
}
