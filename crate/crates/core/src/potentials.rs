//! Interaction potentials with analytic first and second derivatives.
//!
//! Potentials are evaluated on SQUARED distances throughout: the energy of a
//! lattice is `Σ f(|p|²)`, and `eval(r, k)` returns `f^(k)(r)` where `r` is a
//! squared length. This matches every formula in [`crate::calculus`] and
//! avoids a pervasive source of factor-of-two mistakes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("potential argument must be positive (got {0})")]
    NonPositiveArgument(f64),
    #[error("invalid potential parameters: {0}")]
    InvalidParameters(String),
}

/// The built-in potential families.
///
/// - `Gaussian`: `f(r) = e^(-α r)`, `α > 0`.
/// - `InversePower`: `f(r) = r^(-s)`, `s > 0` (direct summation needs
///   `s > 3/2`; smaller exponents go through the accelerated zeta backend).
/// - `LennardJones`: `f(r) = a2 r^(-x2) - a1 r^(-x1)` with `a1, a2 > 0` and
///   `3/2 < x1 < x2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Potential {
    Gaussian { alpha: f64 },
    InversePower { s: f64 },
    LennardJones { a1: f64, a2: f64, x1: f64, x2: f64 },
}

/// One power-law component `coeff · r^(-exponent)`.
#[derive(Debug, Clone, Copy)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

/// Decomposition used by the summation and calculus layers.
#[derive(Debug, Clone)]
pub enum PotentialAtoms {
    Exponential { alpha: f64 },
    Powers(Vec<PowerTerm>),
}

impl Potential {
    pub fn gaussian(alpha: f64) -> Result<Self, PotentialError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(PotentialError::InvalidParameters(format!("alpha = {alpha}, need > 0")));
        }
        Ok(Self::Gaussian { alpha })
    }

    pub fn inverse_power(s: f64) -> Result<Self, PotentialError> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(PotentialError::InvalidParameters(format!("s = {s}, need > 0")));
        }
        Ok(Self::InversePower { s })
    }

    pub fn lennard_jones(a1: f64, a2: f64, x1: f64, x2: f64) -> Result<Self, PotentialError> {
        if !(a1 > 0.0 && a2 > 0.0) {
            return Err(PotentialError::InvalidParameters(format!(
                "a1 = {a1}, a2 = {a2}, need both > 0"
            )));
        }
        if !(x1 > 1.5 && x1 < x2) {
            return Err(PotentialError::InvalidParameters(format!(
                "exponents x1 = {x1}, x2 = {x2}, need 3/2 < x1 < x2"
            )));
        }
        Ok(Self::LennardJones { a1, a2, x1, x2 })
    }

    /// `f(r)`, `f'(r)` or `f''(r)` at the squared distance `r > 0`.
    ///
    /// `order` must be 0, 1 or 2.
    pub fn eval(&self, r: f64, order: u32) -> Result<f64, PotentialError> {
        assert!(order <= 2, "only two derivatives are defined");
        if !(r > 0.0) {
            return Err(PotentialError::NonPositiveArgument(r));
        }
        Ok(match *self {
            Self::Gaussian { alpha } => (-alpha).powi(order as i32) * (-alpha * r).exp(),
            Self::InversePower { s } => power_deriv(1.0, s, r, order),
            Self::LennardJones { a1, a2, x1, x2 } => {
                power_deriv(a2, x2, r, order) - power_deriv(a1, x1, r, order)
            }
        })
    }

    /// Asymptotic decay rate of `|f|` at infinity: the slowest power for the
    /// algebraic families, `+∞` for the Gaussian (exponential decay flag).
    pub fn decay_exponent(&self) -> f64 {
        match *self {
            Self::Gaussian { .. } => f64::INFINITY,
            Self::InversePower { s } => s,
            Self::LennardJones { x1, .. } => x1,
        }
    }

    pub(crate) fn atoms(&self) -> PotentialAtoms {
        match *self {
            Self::Gaussian { alpha } => PotentialAtoms::Exponential { alpha },
            Self::InversePower { s } => {
                PotentialAtoms::Powers(vec![PowerTerm { coeff: 1.0, exponent: s }])
            }
            Self::LennardJones { a1, a2, x1, x2 } => PotentialAtoms::Powers(vec![
                PowerTerm { coeff: a2, exponent: x2 },
                PowerTerm { coeff: -a1, exponent: x1 },
            ]),
        }
    }
}

/// `k`-th derivative of `coeff · r^(-s)`.
fn power_deriv(coeff: f64, s: f64, r: f64, order: u32) -> f64 {
    let factor = match order {
        0 => 1.0,
        1 => -s,
        _ => s * (s + 1.0),
    };
    coeff * factor * r.powf(-(s + order as f64))
}

/// Derivative coefficient of `r^(-s)`: `d^k/dr^k r^(-s) = pow_deriv_coeff(s,k) · r^(-s-k)`.
pub(crate) fn pow_deriv_coeff(s: f64, order: u32) -> f64 {
    match order {
        0 => 1.0,
        1 => -s,
        _ => s * (s + 1.0),
    }
}
