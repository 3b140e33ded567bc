//! Numerical laboratory for analytic Moufang loops.
//!
//! Unit spheres of the Cayley-Dickson algebras (circle, unit quaternions,
//! unit octonions) are coordinatized around the identity. From the chart the
//! crate extracts the tangent Mal'tsev algebra and its structure functions,
//! builds the left/right multiplication birepresentation, and evaluates each
//! identity of the generalized Lie-Cartan theory as a residual.

pub mod algebra;
pub mod birep;
pub mod chart;
pub mod diffkit;
pub mod error;
pub mod liecartan;
pub mod malcev;
pub mod rng;
pub mod suite;
pub mod yamaguti;

pub use error::{Error, Result};
