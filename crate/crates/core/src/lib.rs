//! KdV soliton gas potentials computed three independent ways.
//!
//! * [`nsoliton`] solves the residue conditions of a finite soliton ensemble exactly.
//! * [`gas`] solves the Fredholm equation of the gas Riemann–Hilbert problem.
//! * [`asymptotics`] evaluates the elliptic long-range and long-time formulas.
//!
//! [`validation`] cross-checks them.

pub mod asymptotics;
pub mod error;
pub mod gas;
mod mp;
pub mod nsoliton;
pub mod quadrature;
pub mod special;
pub mod spectral;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
