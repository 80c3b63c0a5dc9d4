//! Diagnostic residuals on the fiber surface: the θ-dependence `u^r` of the
//! surface velocity, the cross-sectional force `f^SB` and its five parts, and
//! the gap between the surface velocity and the Keller–Rubinow centerline
//! velocity.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbtError};
use crate::force::ForceDensity;
use crate::geometry::Frame;
use crate::quadrature::QuadratureSpec;
use crate::sbt::{centerline_velocity_kr, surface_ring, surface_velocity, FieldSample};
use crate::Vec3;

/// Smallest θ grid accepted by [`theta_average`].
pub const MIN_THETA_AVERAGE: usize = 16;
/// Smallest θ grid accepted for the surface force integrals.
pub const MIN_THETA_FORCE: usize = 32;

/// The five parts of the cross-sectional force.
///
/// `pressure` is the pressure traction; `one` through `four` come from the
/// strain rate `2E(u)n` written in the `(e_t, e_ρ, e_θ)` frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceComponents {
    pub pressure: Vec3,
    pub one: Vec3,
    pub two: Vec3,
    pub three: Vec3,
    pub four: Vec3,
}

impl ForceComponents {
    pub fn zero() -> Self {
        ForceComponents {
            pressure: Vec3::zeros(),
            one: Vec3::zeros(),
            two: Vec3::zeros(),
            three: Vec3::zeros(),
            four: Vec3::zeros(),
        }
    }

    pub fn total(&self) -> Vec3 {
        self.pressure + self.one + self.two + self.three + self.four
    }

    pub fn as_array(&self) -> [Vec3; 5] {
        [self.pressure, self.one, self.two, self.three, self.four]
    }
}

/// Everything computed on one cross section `s` of the fiber surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionReport {
    pub s: f64,
    pub f_sb: Vec3,
    pub f_true: Vec3,
    pub components: ForceComponents,
    pub ur_max: f64,
    pub centerline_residual_max: f64,
    pub n_theta: usize,
}

impl CrossSectionReport {
    pub fn force_residual(&self) -> f64 {
        (self.f_sb - self.f_true).norm()
    }

    /// `|Σ components - f_sb| / |f_sb|` (absolute when `f_sb` vanishes).
    pub fn closure_error(&self) -> f64 {
        let d = (self.components.total() - self.f_sb).norm();
        let n = self.f_sb.norm();
        if n > 0.0 { d / n } else { d }
    }
}

fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

/// Mean of samples on a uniform θ grid.
pub fn theta_average(values: &[Vec3]) -> Result<Vec3> {
    if values.len() < MIN_THETA_AVERAGE {
        return Err(SbtError::InvalidInput(format!(
            "theta grid needs at least {MIN_THETA_AVERAGE} points, got {}",
            values.len()
        )));
    }
    let sum = values.iter().fold(Vec3::zeros(), |acc, v| acc + v);
    Ok(sum / values.len() as f64)
}

/// `u^r(θ) = u^SB(s, θ) - (θ-average)` on the uniform θ grid, and its max norm.
pub fn velocity_residual(
    frame: &Frame,
    force: &ForceDensity,
    eps: f64,
    s: f64,
    n_theta: usize,
    spec: &QuadratureSpec,
) -> Result<(Vec<Vec3>, f64)> {
    let ring = surface_ring(frame, force, eps, s, &theta_grid(n_theta), spec)?;
    let u: Vec<Vec3> = ring.iter().map(|f| f.velocity).collect();
    theta_residual(&u)
}

fn theta_residual(u: &[Vec3]) -> Result<(Vec<Vec3>, f64)> {
    let mean = theta_average(u)?;
    let ur: Vec<Vec3> = u.iter().map(|v| v - mean).collect();
    let max = ur.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok((ur, max))
}

/// Returns the five components together with the directly integrated
/// traction `∫ σ n J_ε dθ`.
fn integrate_ring(frame: &Frame, eps: f64, s: f64, thetas: &[f64], ring: &[FieldSample]) -> (ForceComponents, Vec3) {
    let at = frame.at(s);
    let w = 2.0 * PI / thetas.len() as f64;
    let mut c = ForceComponents::zero();
    let mut traction = Vec3::zeros();
    for (&th, field) in thetas.iter().zip(ring) {
        let e_rho = at.e_rho(th);
        let e_theta = at.e_theta(th);
        let g = field.velocity_gradient;
        let jw = eps * (1.0 - eps * at.kappa_hat(th)) * w;
        let g_rho = g * e_rho;
        c.pressure += e_rho * (field.pressure * jw);
        c.one -= g_rho * jw;
        c.two -= e_rho * (e_rho.dot(&g_rho) * jw);
        c.three -= e_theta * (e_rho.dot(&(g * e_theta)) * jw);
        c.four -= at.tangent * (e_rho.dot(&(g * at.tangent)) * jw);
        traction -= field.stress() * e_rho * jw;
    }
    (c, traction)
}

fn check_force_grid(n_theta: usize) -> Result<()> {
    if n_theta < MIN_THETA_FORCE {
        return Err(SbtError::InvalidInput(format!(
            "force integrals need at least {MIN_THETA_FORCE} theta points, got {n_theta}"
        )));
    }
    Ok(())
}

/// The five parts of `f^SB(s)` on a uniform θ grid.
pub fn force_components(
    frame: &Frame,
    force: &ForceDensity,
    eps: f64,
    s: f64,
    n_theta: usize,
    spec: &QuadratureSpec,
) -> Result<ForceComponents> {
    check_force_grid(n_theta)?;
    let thetas = theta_grid(n_theta);
    let ring = surface_ring(frame, force, eps, s, &thetas, spec)?;
    Ok(integrate_ring(frame, eps, s, &thetas, &ring).0)
}

/// Cross-sectional force `f^SB(s) = ∫ σ n J_ε dθ` with `n = -e_ρ`.
pub fn force_sbt(
    frame: &Frame,
    force: &ForceDensity,
    eps: f64,
    s: f64,
    n_theta: usize,
    spec: &QuadratureSpec,
) -> Result<Vec3> {
    check_force_grid(n_theta)?;
    let thetas = theta_grid(n_theta);
    let ring = surface_ring(frame, force, eps, s, &thetas, spec)?;
    Ok(integrate_ring(frame, eps, s, &thetas, &ring).1)
}

/// `u^SB(s, θ) - u_C(s)`.
pub fn centerline_residual(
    frame: &Frame,
    force: &ForceDensity,
    eps: f64,
    s: f64,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<Vec3> {
    let u = surface_velocity(frame, force, eps, s, theta, spec)?;
    let uc = centerline_velocity_kr(frame, force, eps, s, spec)?;
    Ok(u - uc)
}

/// All residuals at one cross section, sharing one field evaluation per θ.
pub fn cross_section(
    frame: &Frame,
    force: &ForceDensity,
    eps: f64,
    s: f64,
    n_theta: usize,
    spec: &QuadratureSpec,
) -> Result<CrossSectionReport> {
    check_force_grid(n_theta)?;
    let thetas = theta_grid(n_theta);
    let ring = surface_ring(frame, force, eps, s, &thetas, spec)?;
    let u: Vec<Vec3> = ring.iter().map(|f| f.velocity).collect();
    let (_, ur_max) = theta_residual(&u)?;
    let (components, f_sb) = integrate_ring(frame, eps, s, &thetas, &ring);
    let uc = centerline_velocity_kr(frame, force, eps, s, spec)?;
    let centerline_residual_max = u.iter().map(|v| (v - uc).norm()).fold(0.0, f64::max);
    Ok(CrossSectionReport {
        s,
        f_sb,
        f_true: force.eval(s),
        components,
        ur_max,
        centerline_residual_max,
        n_theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Centerline, FourierMode};

    fn circle_frame() -> Frame {
        let c = Centerline::build(&[FourierMode::new(1, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])], 256).unwrap();
        Frame::build(&c, 256).unwrap()
    }

    #[test]
    fn theta_average_examples() {
        let c = Vec3::new(1.0, -2.0, 0.5);
        assert_eq!(theta_average(&[c; 16]).unwrap(), c);
        let a = Vec3::new(0.3, 0.7, -1.1);
        let cosine: Vec<Vec3> = theta_grid(32).iter().map(|t| a * t.cos()).collect();
        assert!(theta_average(&cosine).unwrap().norm() < 1e-15);
        let b = Vec3::new(2.0, 0.0, 1.0);
        let mixed: Vec<Vec3> = theta_grid(32).iter().map(|t| a + b * (3.0 * t).cos()).collect();
        assert!((theta_average(&mixed).unwrap() - a).norm() < 1e-15);
        assert!(theta_average(&[c; 8]).is_err());
    }

    #[test]
    fn zero_force() {
        let fr = circle_frame();
        let spec = QuadratureSpec::for_eps(0.01);
        let f = ForceDensity::zero();
        assert_eq!(force_sbt(&fr, &f, 0.01, 0.2, 32, &spec).unwrap(), Vec3::zeros());
        assert_eq!(centerline_residual(&fr, &f, 0.01, 0.2, 0.4, &spec).unwrap(), Vec3::zeros());
    }

    #[test]
    fn components_sum_to_traction_integral() {
        let fr = circle_frame();
        let eps = 0.01;
        let spec = QuadratureSpec::for_eps(eps);
        let f = ForceDensity::new(vec![
            FourierMode::new(0, [0.2, 0.0, 1.0], [0.0; 3]),
            FourierMode::new(1, [0.5, 0.0, 0.0], [0.0, 0.3, 0.0]),
        ])
        .unwrap();
        let total = force_sbt(&fr, &f, eps, 0.3, 64, &spec).unwrap();
        let parts = force_components(&fr, &f, eps, 0.3, 64, &spec).unwrap();
        assert!((parts.total() - total).norm() <= 1e-10 * total.norm());
        let (ur, _) = velocity_residual(&fr, &f, eps, 0.3, 64, &spec).unwrap();
        assert!(theta_average(&ur).unwrap().norm() < 1e-12);
    }
}
