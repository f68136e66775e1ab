//! Interaction energies of 3D Bravais lattices at fixed unit-cell volume.
//!
//! A Bravais lattice of volume `V` is described by five moduli `(u, v, x, y, z)`
//! that fix its Gram matrix up to rotation. This crate evaluates lattice energies
//! `E_f[L] = Σ_{p ∈ L\{0}} f(|p|²)` for Gaussian, inverse-power and
//! Lennard-Jones-type potentials, their analytic gradients and 5×5 Hessians in
//! the moduli coordinates, and classifies the simple cubic, FCC and BCC lattices
//! as local minima / maxima / saddle points of the energy at fixed volume.
//!
//! Modules:
//! - [`lattice`]: moduli parametrization, bases, Gram matrices, dual lattices.
//! - [`potentials`]: the admissible potential families and their derivatives.
//! - [`sums`]: deterministic, error-controlled lattice summation.
//! - [`special`]: 1D Jacobi theta, lattice theta, Epstein zeta, and the
//!   FCC shell series used by the stability thresholds.
//! - [`calculus`]: energies, analytic gradients/Hessians and finite-difference
//!   oracles.
//! - [`stability`]: critical-point classification and volume / parameter
//!   thresholds for the cubic lattices.

// index loops are the clearest form for small dense matrices; !(x > 0.0)
// deliberately rejects NaN; coefficient tables carry their full digits
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod calculus;
pub mod lattice;
pub mod linalg;
pub mod potentials;
pub mod special;
pub mod stability;
pub mod sums;

pub use calculus::{Gradient5, Hessian5};
pub use lattice::{Basis3, FormValue, LatticeError, LatticeParams};
pub use potentials::{Potential, PotentialError};
pub use special::{EpsteinBackend, SpecialError, SpectralScalars, Theta1DValue};
pub use stability::{
    Classification, StabilityError, StabilityReport, ThresholdResult, Tolerances,
};
pub use sums::{SumConfig, SumError, SumResult, SumStrategy, Weight};
