//! Classical slender-body theory for a closed fiber in Stokes flow.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`] builds the arclength-parameterized centerline, the periodic
//!   orthonormal frame with constant twist rate, and surface coordinates.
//! * [`kernels`] holds the Stokeslet, doublet and pressure kernels with their
//!   closed-form gradients.
//! * [`quadrature`] provides periodic, graded near-singular and mapped rules.
//! * [`sbt`] evaluates the slender-body velocity, pressure, gradient and
//!   stress, plus the Keller–Rubinow centerline velocity.
//! * [`residuals`] computes the angular velocity residual, the cross-sectional
//!   force with its five-part split, and the surface-vs-centerline residual.
//! * [`harness`] drives epsilon sweeps, slope fits, constant checks and report
//!   persistence; the `sbt` binary wraps it.
//!
//! Viscosity is fixed to one throughout.

// Validation uses `!(x > 0.0)` so that NaN is rejected along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod force;
pub mod geometry;
pub mod harness;
pub mod kernels;
pub mod par;
pub mod quadrature;
pub mod residuals;
pub mod sbt;

pub use error::{Result, SbtError};
pub use force::ForceDensity;
pub use geometry::{Centerline, FourierMode, Frame, SurfaceCoord};
pub use quadrature::QuadratureSpec;

/// 3-vector used throughout.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3x3 matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
