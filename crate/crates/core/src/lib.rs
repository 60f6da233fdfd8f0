//! Conformal-welding laboratory: Beurling-Ahlfors extensions of circle
//! homeomorphisms, their distortion fields, control-function algebra,
//! discrete boundary geometry and a ring-modulus solver.

pub mod ba_extension;
pub mod circle_homeo;
pub mod cli;
pub mod control;
pub mod distortion;
pub mod error;
pub mod geometry;
pub mod modulus;
pub mod quadrature;
pub mod welding;

pub use error::{Error, Result};
