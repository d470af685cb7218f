//! Archimedean special functions: the Siegel gamma, Shimura's η, real
//! Whittaker values and the n = 1 central derivative, Kummer's U, the
//! asymptotic limit theorem, and the Green function with its n = 1 height.

pub mod quad;
pub mod special;
pub mod eta;
pub mod whittaker;
pub mod green;

pub use quad::{FloatScalar, QuadResult, QuadratureSpec};
pub use whittaker::{ConfluentParams, RadialPoint};
pub use green::GreenEvaluation;
