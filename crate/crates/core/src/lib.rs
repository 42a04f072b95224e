//! Numerics for the half-line Schrödinger operator with critical inverse-square
//! potential, H = −d²/dx² − 1/(4x²) + q(x).

// NaN-rejecting `!(a > b)` guards and index loops over fixed-size tables are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod acceptance;
pub mod error;
pub mod estimates;
pub mod exec;
pub mod ode;
pub mod freeops;
pub mod potential;
pub mod propagator;
pub mod quad;
pub mod scattering;
pub mod specfun;
pub mod volterra;

pub use error::{Error, Result};
pub use potential::Potential;
