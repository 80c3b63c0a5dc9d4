use serde::{Deserialize, Serialize};

use super::frame::Frame;
use crate::error::Result;
use crate::Vec3;

/// Tube coordinates `x = X(s) + ρ e_ρ(s, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCoord {
    pub s: f64,
    pub theta: f64,
    pub rho: f64,
}

impl SurfaceCoord {
    pub fn to_point(&self, frame: &Frame) -> Vec3 {
        let at = frame.at(self.s);
        at.x + at.e_rho(self.theta) * self.rho
    }

    /// Tube coordinates of `x`, or `None` when `x` is not within `r_max` of
    /// the centerline.
    pub fn from_point(frame: &Frame, x: &Vec3) -> Option<SurfaceCoord> {
        let (s, rho) = frame.centerline().closest_point(x);
        if rho >= frame.r_max() {
            return None;
        }
        let at = frame.at(s);
        let d = x - at.x;
        let theta = d.dot(&at.normal2).atan2(d.dot(&at.normal1)).rem_euclid(2.0 * std::f64::consts::PI);
        Some(SurfaceCoord { s, theta, rho })
    }
}

/// Point on the fiber surface `Γ_ε` and the unit normal pointing into the
/// fiber, `-e_ρ`.
pub fn surface_point(frame: &Frame, eps: f64, s: f64, theta: f64) -> Result<(Vec3, Vec3)> {
    frame.check_eps(eps)?;
    let at = frame.at(s);
    let e_rho = at.e_rho(theta);
    Ok((at.x + e_rho * eps, -e_rho))
}

/// Surface area element `J_ε = ε(1 - ε(κ1 cos θ + κ2 sin θ))`.
pub fn jacobian(frame: &Frame, eps: f64, s: f64, theta: f64) -> Result<f64> {
    frame.check_eps(eps)?;
    let at = frame.at(s);
    Ok(eps * (1.0 - eps * at.kappa_hat(theta)))
}
