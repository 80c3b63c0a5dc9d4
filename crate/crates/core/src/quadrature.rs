//! One-dimensional rules over the periodic arclength domain.
//!
//! Near-singular integrands (peaked with width `ε` around `s̄ = 0`) use
//! composite 16-point Gauss–Legendre panels graded geometrically toward the
//! peak. Accuracy is estimated by comparing two successive uniform
//! refinements of that panel layout.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbtError};
use crate::{Mat3, Vec3};

/// Points per Gauss–Legendre panel.
pub const GAUSS_ORDER: usize = 16;

/// Values that can be accumulated by a quadrature rule.
pub trait Integrand: Copy + Send + Sync {
    fn zero() -> Self;
    fn add_scaled(&mut self, other: &Self, w: f64);
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += w * other;
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Vec3 {
    fn zero() -> Self {
        Vec3::zeros()
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        self.axpy(w, other, 1.0);
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Integrand for Mat3 {
    fn zero() -> Self {
        Mat3::zeros()
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Legendre polynomial `P_n(z)` and its derivative.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn gauss16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_ORDER))
}

/// Tuning for the arclength quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Node count of the periodic trapezoid rule used for far-field points.
    pub base_nodes: usize,
    /// Half-width `δ` of the geometrically graded window around the peak.
    pub near_window: f64,
    /// Uniform bisections applied to every graded panel (at least 1; the
    /// error estimate compares this level with the one below).
    pub near_refinement_levels: u32,
    pub target_rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            base_nodes: 256,
            near_window: 0.125,
            near_refinement_levels: 1,
            target_rel_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        base_nodes: usize,
        near_window: f64,
        near_refinement_levels: u32,
        target_rel_tol: f64,
    ) -> Result<Self> {
        let spec = QuadratureSpec {
            base_nodes,
            near_window,
            near_refinement_levels,
            target_rel_tol,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default resolution for fiber radius `eps`: `max(256, ceil(8/ε))`
    /// trapezoid nodes and a graded window of `min(1/8, 64ε)`.
    pub fn for_eps(eps: f64) -> Self {
        QuadratureSpec {
            base_nodes: 256usize.max((8.0 / eps).ceil() as usize),
            near_window: (64.0 * eps).min(0.125),
            ..QuadratureSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_nodes < 64 {
            return Err(SbtError::ConfigInvalid(format!(
                "base_nodes must be >= 64, got {}",
                self.base_nodes
            )));
        }
        if !(self.near_window > 0.0 && self.near_window <= 0.25) {
            return Err(SbtError::ConfigInvalid(format!(
                "near_window must lie in (0, 1/4], got {}",
                self.near_window
            )));
        }
        if self.near_refinement_levels == 0 {
            return Err(SbtError::ConfigInvalid(
                "near_refinement_levels must be >= 1".into(),
            ));
        }
        if !(self.target_rel_tol > 0.0 && self.target_rel_tol <= 1e-3) {
            return Err(SbtError::ConfigInvalid(format!(
                "target_rel_tol must lie in (0, 1e-3], got {}",
                self.target_rel_tol
            )));
        }
        Ok(())
    }

    /// Same spec with each graded panel bisected `extra` more times and the
    /// trapezoid node count multiplied by `2^extra`.
    pub fn refined(&self, extra: u32) -> Self {
        QuadratureSpec {
            base_nodes: self.base_nodes << extra,
            near_refinement_levels: self.near_refinement_levels + extra,
            ..*self
        }
    }
}

/// A fixed node/weight set over an interval of the arclength offset `s̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule, summing in node order.
    pub fn integrate<V: Integrand>(&self, f: impl Fn(f64) -> V) -> V {
        let mut acc = V::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add_scaled(&f(x), w);
        }
        acc
    }

    /// Trapezoid nodes `j/n` on `[0, 1)`, equal weights.
    pub fn periodic(n: usize) -> LineRule {
        let h = 1.0 / n as f64;
        LineRule {
            nodes: (0..n).map(|j| j as f64 * h).collect(),
            weights: vec![h; n],
        }
    }

    /// Composite Gauss rule over the given panel breakpoints, each panel
    /// split into `2^level` equal pieces.
    pub fn composite(breaks: &[f64], level: u32) -> LineRule {
        let (gx, gw) = gauss16();
        let pieces = 1usize << level;
        let mut nodes = Vec::with_capacity((breaks.len() - 1) * pieces * GAUSS_ORDER);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let h = (b - a) / pieces as f64;
            for p in 0..pieces {
                let lo = a + p as f64 * h;
                let mid = lo + 0.5 * h;
                for (x, w) in gx.iter().zip(gw) {
                    nodes.push(mid + 0.5 * h * x);
                    weights.push(0.5 * h * w);
                }
            }
        }
        LineRule { nodes, weights }
    }

    /// Graded rule on `[-1/2, 1/2]` for an integrand peaked at `s̄ = 0` with
    /// width `peak_scale`.
    pub fn graded(peak_scale: f64, spec: &QuadratureSpec, level: u32) -> LineRule {
        let half = graded_breaks(peak_scale, spec.near_window);
        let mut breaks: Vec<f64> = half.iter().rev().map(|b| -b).collect();
        breaks.extend_from_slice(&half[1..]);
        LineRule::composite(&breaks, level)
    }

    /// Graded rule on `[0, 1/2]` only, dense toward 0.
    pub fn graded_half(peak_scale: f64, spec: &QuadratureSpec, level: u32) -> LineRule {
        LineRule::composite(&graded_breaks(peak_scale, spec.near_window), level)
    }
}

/// Panel breakpoints on `[0, 1/2]`: `h0, 2h0, 4h0, ...` up to the window
/// edge with `h0 = peak_scale/4`, then uniform panels no wider than
/// `min(window, 1/16)`.
fn graded_breaks(peak_scale: f64, window: f64) -> Vec<f64> {
    let window = window.min(0.5);
    let h0 = (0.25 * peak_scale).min(window);
    let mut breaks = vec![0.0];
    let mut b = h0;
    while b < window * (1.0 - 1e-12) {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(window);
    let width = window.min(1.0 / 16.0);
    let outer = ((0.5 - window) / width).ceil() as usize;
    for k in 1..=outer {
        breaks.push(window + (0.5 - window) * k as f64 / outer as f64);
    }
    breaks
}

/// Periodic trapezoid rule `(1/n) Σ f(j/n)` over the unit period.
pub fn periodic_trapezoid<V: Integrand>(f: impl Fn(f64) -> V, n: usize) -> V {
    LineRule::periodic(n).integrate(f)
}

/// Integrates `f` over `s̄ ∈ [-1/2, 1/2]` where `f` is smooth but peaked with
/// width `peak_scale` around 0.
///
/// Returns the finer of the two top refinement levels; fails with
/// [`SbtError::ToleranceNotMet`] if they disagree by more than ten times the
/// target tolerance, measured relative to `∫|f|`.
pub fn near_singular_line_quad<V: Integrand>(
    f: impl Fn(f64) -> V,
    peak_scale: f64,
    spec: &QuadratureSpec,
) -> Result<V> {
    spec.validate()?;
    if !(peak_scale > 0.0 && peak_scale < 0.125) {
        return Err(SbtError::InvalidInput(format!(
            "peak_scale must lie in (0, 1/8), got {peak_scale}"
        )));
    }
    let level = spec.near_refinement_levels;
    let fine = LineRule::graded(peak_scale, spec, level);
    let coarse = LineRule::graded(peak_scale, spec, level - 1);
    let mut scale = 0.0;
    let mut value = V::zero();
    for (&x, &w) in fine.nodes.iter().zip(&fine.weights) {
        let v = f(x);
        scale += w * v.magnitude();
        value.add_scaled(&v, w);
    }
    let rough = coarse.integrate(&f);
    check_agreement(&value, &rough, scale, spec.target_rel_tol)?;
    Ok(value)
}

/// Fails if `fine` and `coarse` differ by more than `10 tol` relative to `scale`.
pub(crate) fn check_agreement<V: Integrand>(fine: &V, coarse: &V, scale: f64, tol: f64) -> Result<()> {
    let mut diff = *fine;
    diff.add_scaled(coarse, -1.0);
    let denom = scale.max(fine.magnitude()).max(f64::MIN_POSITIVE);
    let estimate = diff.magnitude() / denom;
    if estimate > 10.0 * tol {
        return Err(SbtError::ToleranceNotMet { estimate, tol });
    }
    Ok(())
}

/// `d_mn = ∫_{-∞}^{∞} τ^m/(τ²+1)^{n/2} dτ` for even `m ≥ 0` and `n ≥ m+3`.
///
/// Evaluated after the substitution `τ = tan φ`, which turns the integrand
/// into the smooth `sin^m φ cos^(n-m-2) φ` on `(-π/2, π/2)`.
pub fn dmn_integral(m: u32, n: u32) -> f64 {
    debug_assert!(m.is_multiple_of(2) && n >= m + 3);
    let panels = 16;
    let breaks: Vec<f64> = (0..=panels)
        .map(|k| -0.5 * PI + PI * k as f64 / panels as f64)
        .collect();
    let p = (n - m - 2) as i32;
    LineRule::composite(&breaks, 0).integrate(|phi: f64| phi.sin().powi(m as i32) * phi.cos().powi(p))
}
