//! Fiber centerline, periodic orthonormal frame and tube coordinates.

mod centerline;
mod frame;
mod surface;

pub use centerline::{Centerline, CurvePoint, FourierMode, MIN_CENTERLINE_SAMPLES};
pub use frame::{Frame, FrameAt, MIN_FRAME_SAMPLES};
pub use surface::{jacobian, surface_point, SurfaceCoord};
