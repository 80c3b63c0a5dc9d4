//! Reference evaluations shared by the integration tests: dense uniform
//! quadrature with the matrix-valued kernels, and finite-difference
//! derivatives.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sbt_core::geometry::{Centerline, FourierMode, Frame};
use sbt_core::kernels::{doublet, grad_doublet, grad_stokeslet, pressure_kernel, stokeslet};
use sbt_core::quadrature::gauss_legendre;
use sbt_core::sbt::FieldSample;
use sbt_core::{ForceDensity, Mat3, Vec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn circle() -> Frame {
    let c = Centerline::build(&[FourierMode::new(1, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])], 512).unwrap();
    Frame::build(&c, 512).unwrap()
}

pub fn knot() -> Frame {
    sbt_core::harness::CurveSpec::named("fourier-knot").build().unwrap()
}

pub fn harmonic() -> ForceDensity {
    sbt_core::harness::ForceSpec::named("harmonic").build().unwrap()
}

/// Uniform composite 16-point Gauss rule with `panels` panels on `[a, b]`.
pub fn uniform_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(16);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * 16);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((mid + 0.5 * h * xi, 0.5 * h * wi));
        }
    }
    out
}

/// Fields at `x` from a uniform rule of `panels` panels over one period
/// starting half a period before the closest centerline point.
pub fn dense_fields(frame: &Frame, force: &ForceDensity, eps: f64, x: &Vec3, panels: usize) -> FieldSample {
    let c = frame.centerline();
    let (s0, _) = c.closest_point(x);
    let mut u = Vec3::zeros();
    let mut p = 0.0;
    let mut g = Mat3::zeros();
    for (t, w) in uniform_rule(s0 - 0.5, s0 + 0.5, panels) {
        let r = x - c.position(t.rem_euclid(1.0));
        let f = force.eval(t.rem_euclid(1.0));
        u += (stokeslet(&r).unwrap() + doublet(&r).unwrap() * (0.5 * eps * eps)) * f * w;
        p += pressure_kernel(&r).unwrap().dot(&f) * w;
        g += (grad_stokeslet(&r).unwrap().apply(&f) + grad_doublet(&r).unwrap().apply(&f) * (0.5 * eps * eps)) * w;
    }
    FieldSample {
        velocity: u / (8.0 * PI),
        pressure: p / (4.0 * PI),
        velocity_gradient: g / (8.0 * PI),
    }
}

/// Keller–Rubinow centerline velocity with `panels` uniform panels on each
/// side of `t = s`.
pub fn dense_kr(frame: &Frame, force: &ForceDensity, eps: f64, s: f64, panels: usize) -> Vec3 {
    let c = frame.centerline();
    let x0 = c.position(s);
    let t = c.eval(s, 1);
    let f0 = force.eval(s);
    let tt = t * t.transpose();
    let id = Mat3::identity();
    let local = ((id - tt * 3.0) - (id + tt) * (2.0 * (PI * eps / 4.0).ln())) * f0;
    let mut integral = Vec3::zeros();
    for (sb, w) in uniform_rule(0.0, 0.5, panels) {
        for sign in [-1.0, 1.0] {
            let tp = (s + sign * sb).rem_euclid(1.0);
            let r0 = x0 - c.position(tp);
            let kernel = stokeslet(&r0).unwrap() * force.eval(tp);
            integral += (kernel - (id + tt) * f0 / ((PI * sb).sin() / PI)) * w;
        }
    }
    (local + integral) / (8.0 * PI)
}

/// Fourth-order central difference of `f` along `dir`.
pub fn fd4<V>(f: impl Fn(&Vec3) -> V, x: &Vec3, dir: &Vec3, h: f64) -> V
where
    V: std::ops::Sub<Output = V> + std::ops::Mul<f64, Output = V> + std::ops::Add<Output = V>,
{
    let a = f(&(x + dir * (2.0 * h)));
    let b = f(&(x + dir * h));
    let c = f(&(x - dir * h));
    let d = f(&(x - dir * (2.0 * h)));
    ((b - c) * 8.0 - (a - d)) * (1.0 / (12.0 * h))
}

pub fn rel(a: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        a / scale
    } else {
        a
    }
}
