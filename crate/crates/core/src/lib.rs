//! Exact enumeration of nodal plane curves in projective 3-space meeting
//! general lines, by torus localization on relative Hilbert schemes of
//! points, with an independent Chow-ring cross-check.

pub mod arith;
pub mod checks;
pub mod crosscheck;
pub mod error;
pub mod fixed_points;
pub mod integrand;
pub mod localization;
pub mod node_polynomials;
pub mod weights;

pub use error::{Error, Result};
