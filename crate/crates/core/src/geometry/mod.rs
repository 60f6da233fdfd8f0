//! Discrete Jordan-curve geometry.

pub mod curve;
pub mod domains;
pub mod duality;
pub mod envelope;
pub mod hull;
pub mod raster;

pub use curve::{JordanCurve, Point};
pub use domains::{make_domain, DomainFamily};
pub use duality::{duality_check, DualityOptions, DualityReport};
pub use envelope::{three_point_envelope, Envelope, FitFamily};
pub use raster::{internal_distance, lc_check, LcKind, LcOptions, LcReport, Side};
