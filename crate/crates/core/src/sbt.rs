//! Slender-body velocity, pressure, gradient and stress fields, and the
//! Keller–Rubinow centerline velocity.
//!
//! With `R = x - X(t)`:
//!
//! ```text
//! 8π u(x) = ∫_T (S(R) + ε²/2 D(R)) f(t) dt
//! 4π p(x) = ∫_T R·f(t)/|R|³ dt
//! ```
//!
//! Points within the graded window of the centerline are integrated with
//! [`LineRule::graded`] centered at the closest arclength; farther points use
//! the periodic trapezoid rule. Either way the result is cross-checked
//! against a coarser rule.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbtError};
use crate::force::ForceDensity;
use crate::geometry::{surface_point, Frame};
use crate::kernels::{contract_all, contract_value};
use crate::quadrature::{check_agreement, LineRule, QuadratureSpec};
use crate::{Mat3, Vec3};

/// Panels per half period in the Keller–Rubinow finite-part integral at
/// refinement level 0.
const KR_PANELS: usize = 16;

/// Velocity, pressure and velocity gradient `G_ik = ∂u_i/∂x_k` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub velocity: Vec3,
    pub pressure: f64,
    pub velocity_gradient: Mat3,
}

impl FieldSample {
    pub fn zero() -> Self {
        FieldSample {
            velocity: Vec3::zeros(),
            pressure: 0.0,
            velocity_gradient: Mat3::zeros(),
        }
    }

    /// `σ = ∇u + ∇uᵀ - p I`.
    pub fn stress(&self) -> Mat3 {
        let g = self.velocity_gradient;
        g + g.transpose() - Mat3::identity() * self.pressure
    }
}

/// Centerline positions and force values on a fixed rule.
#[derive(Debug, Clone)]
pub(crate) struct SampledLine {
    weights: Vec<f64>,
    x: Vec<Vec3>,
    f: Vec<Vec3>,
}

#[derive(Debug, Clone, Copy)]
struct Accum {
    value: FieldSample,
    scale_u: f64,
    scale_p: f64,
    scale_g: f64,
}

impl SampledLine {
    fn new(frame: &Frame, force: &ForceDensity, center: f64, rule: &LineRule) -> Self {
        let c = frame.centerline();
        let mut x = Vec::with_capacity(rule.len());
        let mut f = Vec::with_capacity(rule.len());
        for &sb in &rule.nodes {
            let t = (center + sb).rem_euclid(1.0);
            x.push(c.position(t));
            f.push(force.eval(t));
        }
        SampledLine {
            weights: rule.weights.clone(),
            x,
            f,
        }
    }

    /// Every other node of a trapezoid sampling, weights doubled.
    fn decimated(&self) -> Self {
        SampledLine {
            weights: self.weights.iter().step_by(2).map(|w| 2.0 * w).collect(),
            x: self.x.iter().step_by(2).copied().collect(),
            f: self.f.iter().step_by(2).copied().collect(),
        }
    }

    fn accumulate(&self, p: &Vec3, eps: f64, full: bool) -> Accum {
        let half_eps2 = 0.5 * eps * eps;
        let mut u = Vec3::zeros();
        let mut pr = 0.0;
        let mut g = Mat3::zeros();
        let (mut su, mut sp, mut sg) = (0.0, 0.0, 0.0);
        for ((w, x), f) in self.weights.iter().zip(&self.x).zip(&self.f) {
            let r = p - x;
            if full {
                let k = contract_all(&r, f);
                let ui = k.s_f + k.d_f * half_eps2;
                let gi = k.grad_s_f + k.grad_d_f * half_eps2;
                u.axpy(*w, &ui, 1.0);
                pr += w * k.p;
                g += gi * *w;
                su += w * ui.norm();
                sp += w * k.p.abs();
                sg += w * gi.norm();
            } else {
                let (s_f, d_f, _) = contract_value(&r, f);
                let ui = s_f + d_f * half_eps2;
                u.axpy(*w, &ui, 1.0);
                su += w * ui.norm();
            }
        }
        let c_u = 1.0 / (8.0 * PI);
        let c_p = 1.0 / (4.0 * PI);
        Accum {
            value: FieldSample {
                velocity: u * c_u,
                pressure: pr * c_p,
                velocity_gradient: g * c_u,
            },
            scale_u: su * c_u,
            scale_p: sp * c_p,
            scale_g: sg * c_u,
        }
    }
}

/// A fine sampling with a coarser companion for error estimation.
#[derive(Debug, Clone)]
pub(crate) struct Stencil {
    fine: SampledLine,
    coarse: SampledLine,
    tol: f64,
}

impl Stencil {
    /// Graded sampling centered at arclength `center` for peak width `peak`.
    pub(crate) fn near(frame: &Frame, force: &ForceDensity, center: f64, peak: f64, spec: &QuadratureSpec) -> Self {
        let level = spec.near_refinement_levels;
        Stencil {
            fine: SampledLine::new(frame, force, center, &LineRule::graded(peak, spec, level)),
            coarse: SampledLine::new(frame, force, center, &LineRule::graded(peak, spec, level - 1)),
            tol: spec.target_rel_tol,
        }
    }

    /// Periodic trapezoid sampling with `spec.base_nodes` nodes.
    pub(crate) fn far(frame: &Frame, force: &ForceDensity, spec: &QuadratureSpec) -> Self {
        let n = spec.base_nodes + spec.base_nodes % 2;
        let fine = SampledLine::new(frame, force, 0.0, &LineRule::periodic(n));
        let coarse = fine.decimated();
        Stencil {
            fine,
            coarse,
            tol: spec.target_rel_tol,
        }
    }

    pub(crate) fn eval(&self, p: &Vec3, eps: f64, full: bool) -> Result<FieldSample> {
        let a = self.fine.accumulate(p, eps, full);
        let b = self.coarse.accumulate(p, eps, full);
        check_agreement(&a.value.velocity, &b.value.velocity, a.scale_u, self.tol)?;
        if full {
            check_agreement(&a.value.pressure, &b.value.pressure, a.scale_p, self.tol)?;
            check_agreement(&a.value.velocity_gradient, &b.value.velocity_gradient, a.scale_g, self.tol)?;
        }
        Ok(a.value)
    }
}

fn is_far(distance: f64, spec: &QuadratureSpec) -> bool {
    distance >= spec.near_window.max(16.0 / spec.base_nodes as f64)
}

fn field_at(
    frame: &Frame,
    force: &ForceDensity,
    eps: f64,
    x: &Vec3,
    spec: &QuadratureSpec,
    full: bool,
) -> Result<FieldSample> {
    spec.validate()?;
    if !(eps > 0.0) {
        return Err(SbtError::InvalidInput(format!("fiber radius must be positive, got {eps}")));
    }
    let (s, distance) = frame.centerline().closest_point(x);
    if distance < 0.5 * eps {
        return Err(SbtError::TooCloseToCenterline {
            distance,
            limit: 0.5 * eps,
        });
    }
    if force.is_zero() {
        return Ok(FieldSample::zero());
    }
    let stencil = if is_far(distance, spec) {
        Stencil::far(frame, force, spec)
    } else {
        Stencil::near(frame, force, s, distance, spec)
    };
    stencil.eval(x, eps, full)
}

/// Velocity, pressure and gradient at `x` for fiber radius `eps`.
pub fn field_sample(frame: &Frame, force: &ForceDensity, eps: f64, x: &Vec3, spec: &QuadratureSpec) -> Result<FieldSample> {
    field_at(frame, force, eps, x, spec, true)
}

/// Slender-body velocity `u^SB(x)`.
pub fn velocity(frame: &Frame, force: &ForceDensity, eps: f64, x: &Vec3, spec: &QuadratureSpec) -> Result<Vec3> {
    Ok(field_at(frame, force, eps, x, spec, false)?.velocity)
}

/// Slender-body pressure `p^SB(x)`.
pub fn pressure(frame: &Frame, force: &ForceDensity, eps: f64, x: &Vec3, spec: &QuadratureSpec) -> Result<f64> {
    Ok(field_sample(frame, force, eps, x, spec)?.pressure)
}

/// `∇u^SB(x)` with `G_ik = ∂u_i/∂x_k`.
pub fn velocity_gradient(frame: &Frame, force: &ForceDensity, eps: f64, x: &Vec3, spec: &QuadratureSpec) -> Result<Mat3> {
    Ok(field_sample(frame, force, eps, x, spec)?.velocity_gradient)
}

/// Stress `σ = ∇u + ∇uᵀ - p I` (unit viscosity).
pub fn stress(frame: &Frame, force: &ForceDensity, eps: f64, x: &Vec3, spec: &QuadratureSpec) -> Result<Mat3> {
    Ok(field_sample(frame, force, eps, x, spec)?.stress())
}

/// `u^SB` on the fiber surface, by composition with [`surface_point`].
pub fn surface_velocity(
    frame: &Frame,
    force: &ForceDensity,
    eps: f64,
    s: f64,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<Vec3> {
    let (x, _) = surface_point(frame, eps, s, theta)?;
    velocity(frame, force, eps, &x, spec)
}

/// Fields at the surface points `X(s) + ε e_ρ(s, θ)` for every `θ` in
/// `thetas`, sharing one graded sampling centered at `s`.
pub fn surface_ring(
    frame: &Frame,
    force: &ForceDensity,
    eps: f64,
    s: f64,
    thetas: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<FieldSample>> {
    frame.check_eps(eps)?;
    spec.validate()?;
    if force.is_zero() {
        return Ok(vec![FieldSample::zero(); thetas.len()]);
    }
    let at = frame.at(s);
    let stencil = Stencil::near(frame, force, s, eps, spec);
    thetas
        .iter()
        .map(|&th| stencil.eval(&(at.x + at.e_rho(th) * eps), eps, true))
        .collect()
}

/// Finite-part integral of the Keller–Rubinow formula (times 8π),
/// integrated separately on each side of `t = s` where the subtracted
/// integrand is smooth.
fn kr_integral(frame: &Frame, force: &ForceDensity, s: f64, panels: usize, level: u32) -> (Vec3, f64) {
    let c = frame.centerline();
    let x0 = c.position(s);
    let t = c.eval(s, 1);
    let f0 = force.eval(s);
    let local = f0 + t * t.dot(&f0);
    let breaks: Vec<f64> = (0..=panels).map(|k| 0.5 * k as f64 / panels as f64).collect();
    let rule = LineRule::composite(&breaks, level);
    let mut acc = Vec3::zeros();
    let mut scale = 0.0;
    for sign in [-1.0, 1.0] {
        for (&sb, &w) in rule.nodes.iter().zip(&rule.weights) {
            let tt = s + sign * sb;
            let r0 = x0 - c.position(tt);
            let ft = force.eval(tt);
            let (s_f, _, _) = contract_value(&r0, &ft);
            let sub = local * (PI / (PI * sb).sin());
            let v = s_f - sub;
            acc.axpy(w, &v, 1.0);
            scale += w * v.norm();
        }
    }
    (acc, scale)
}

fn kr_local(frame: &Frame, force: &ForceDensity, eps: f64, s: f64) -> Vec3 {
    let t = frame.centerline().eval(s, 1);
    let f0 = force.eval(s);
    let tf = t.dot(&f0);
    let log = (PI * eps / 4.0).ln();
    (f0 - t * (3.0 * tf)) - (f0 + t * tf) * (2.0 * log)
}

/// Keller–Rubinow centerline velocity `u_C(s)`.
pub fn centerline_velocity_kr(
    frame: &Frame,
    force: &ForceDensity,
    eps: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<Vec3> {
    frame.check_eps(eps)?;
    spec.validate()?;
    let level = spec.near_refinement_levels;
    let (fine, scale) = kr_integral(frame, force, s, KR_PANELS, level);
    let (coarse, _) = kr_integral(frame, force, s, KR_PANELS, level - 1);
    let local = kr_local(frame, force, eps, s);
    check_agreement(&fine, &coarse, scale + local.norm(), spec.target_rel_tol)?;
    Ok((local + fine) / (8.0 * PI))
}

/// Keller–Rubinow velocity evaluated with `panels` Gauss panels per half
/// period and no error estimate; used for dense reference evaluations.
pub fn centerline_velocity_kr_with_panels(frame: &Frame, force: &ForceDensity, eps: f64, s: f64, panels: usize) -> Vec3 {
    let (integral, _) = kr_integral(frame, force, s, panels, 0);
    (kr_local(frame, force, eps, s) + integral) / (8.0 * PI)
}
