//! Local quantities for arithmetic Siegel–Weil: p-adic representation
//! densities and finite Whittaker values, archimedean Whittaker functions and
//! their derivatives, Green-function heights, and the assembly of central
//! derivative coefficients.

pub mod error;
pub mod rat;
pub mod matrix;
pub mod quadform;
pub mod localdensity;
pub mod archwhittaker;
pub mod eisenstein;
pub mod acceptance;

pub use archwhittaker::FloatScalar;
pub use error::{Error, Result};
pub use num::complex::Complex64;

/// Default floating scalar for the numeric modules.
pub type Real = f64;
