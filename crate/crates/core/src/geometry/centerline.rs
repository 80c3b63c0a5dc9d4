use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbtError};
use crate::par;
use crate::quadrature::gauss_legendre;
use crate::Vec3;

pub const MIN_CENTERLINE_SAMPLES: usize = 64;

/// Grid size of the brute-force chord/arc scan behind the `c_Γ` estimate.
const CHORD_GRID: usize = 2048;
/// Coarse scan used to seed closest-point searches.
const CLOSEST_SCAN: usize = 1024;

/// One Fourier wavenumber of a closed curve or force density:
/// `cos·cos(2πks) + sin·sin(2πks)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub k: u32,
    #[serde(default)]
    pub cos: [f64; 3],
    #[serde(default)]
    pub sin: [f64; 3],
}

impl FourierMode {
    pub fn new(k: u32, cos: [f64; 3], sin: [f64; 3]) -> Self {
        FourierMode { k, cos, sin }
    }
}

/// Position and its first two derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
}

/// Evaluates a Fourier series and its first two derivatives at `u`.
pub(crate) fn fourier_eval(modes: &[FourierMode], u: f64) -> CurvePoint {
    let mut x = Vec3::zeros();
    let mut d1 = Vec3::zeros();
    let mut d2 = Vec3::zeros();
    for m in modes {
        let a = Vec3::from(m.cos);
        let b = Vec3::from(m.sin);
        if m.k == 0 {
            x += a;
            continue;
        }
        let w = 2.0 * PI * m.k as f64;
        let (s, c) = (w * u).sin_cos();
        x += a * c + b * s;
        d1 += (b * c - a * s) * w;
        d2 -= (a * c + b * s) * (w * w);
    }
    CurvePoint { x, d1, d2 }
}

fn fourier_d1(modes: &[FourierMode], u: f64) -> Vec3 {
    let mut d1 = Vec3::zeros();
    for m in modes.iter().filter(|m| m.k > 0) {
        let w = 2.0 * PI * m.k as f64;
        let (s, c) = (w * u).sin_cos();
        d1 += (Vec3::from(m.sin) * c - Vec3::from(m.cos) * s) * w;
    }
    d1
}

fn gauss8() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(8))
}

fn speed_integral(modes: &[FourierMode], a: f64, b: f64) -> f64 {
    let (gx, gw) = gauss8();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    gx.iter()
        .zip(gw)
        .map(|(x, w)| w * fourier_d1(modes, mid + half * x).norm())
        .sum::<f64>()
        * half
}

/// Closed curve of unit length, parameterized by arclength `s ∈ [0, 1)`.
///
/// Internally the curve is a Fourier series in a raw parameter `u`; the
/// arclength map is tabulated on a uniform `u` grid and inverted per query
/// with a cubic Hermite guess (exact slopes `du/ds = 1/|r'(u)|`) followed by
/// one Newton step.
#[derive(Debug, Clone)]
pub struct Centerline {
    modes: Vec<FourierMode>,
    raw_length: f64,
    /// Cumulative arclength at `u_j = j/M`, `j = 0..=M`; last entry is 1.
    arclength: Vec<f64>,
    /// `|r'(u_j)|` on the same grid.
    speed: Vec<f64>,
    c_gamma: f64,
    kappa_max: f64,
}

impl Centerline {
    /// Rescales the curve to unit length and tabulates its arclength map.
    ///
    /// Fails with [`SbtError::DegenerateCurve`] when the raw length is below
    /// `1e-12` and [`SbtError::SelfIntersection`] when the `c_Γ` estimate is
    /// below `1e-6`.
    pub fn build(raw_modes: &[FourierMode], samples: usize) -> Result<Centerline> {
        if samples < MIN_CENTERLINE_SAMPLES {
            return Err(SbtError::InvalidInput(format!(
                "centerline needs at least {MIN_CENTERLINE_SAMPLES} samples, got {samples}"
            )));
        }
        if raw_modes.is_empty() {
            return Err(SbtError::InvalidInput("centerline has no Fourier modes".into()));
        }
        if raw_modes
            .iter()
            .any(|m| m.cos.iter().chain(&m.sin).any(|v| !v.is_finite()))
        {
            return Err(SbtError::InvalidInput("non-finite Fourier coefficient".into()));
        }
        let raw_length: f64 = (0..samples)
            .map(|j| speed_integral(raw_modes, j as f64 / samples as f64, (j + 1) as f64 / samples as f64))
            .sum();
        if !(raw_length >= 1e-12) {
            return Err(SbtError::DegenerateCurve { length: raw_length });
        }
        let scale = 1.0 / raw_length;
        let modes: Vec<FourierMode> = raw_modes
            .iter()
            .map(|m| FourierMode {
                k: m.k,
                cos: m.cos.map(|v| v * scale),
                sin: m.sin.map(|v| v * scale),
            })
            .collect();

        let mut arclength = Vec::with_capacity(samples + 1);
        let mut acc = 0.0;
        arclength.push(0.0);
        for j in 0..samples {
            acc += speed_integral(&modes, j as f64 / samples as f64, (j + 1) as f64 / samples as f64);
            arclength.push(acc);
        }
        let total = acc;
        for l in arclength.iter_mut() {
            *l /= total;
        }
        *arclength.last_mut().unwrap() = 1.0;
        let speed: Vec<f64> = (0..=samples)
            .map(|j| fourier_d1(&modes, j as f64 / samples as f64).norm() / total)
            .collect();
        if speed.iter().any(|&v| !(v > 0.0)) {
            return Err(SbtError::DegenerateCurve { length: raw_length });
        }
        // absorb the quadrature mismatch so the table is exactly unit length
        let modes: Vec<FourierMode> = modes
            .into_iter()
            .map(|m| FourierMode {
                k: m.k,
                cos: m.cos.map(|v| v / total),
                sin: m.sin.map(|v| v / total),
            })
            .collect();

        let mut curve = Centerline {
            modes,
            raw_length,
            arclength,
            speed,
            c_gamma: 0.0,
            kappa_max: 0.0,
        };
        curve.kappa_max = curve.scan_kappa_max(8 * samples.max(512));
        curve.c_gamma = curve.estimate_c_gamma();
        if !(curve.c_gamma >= 1e-6) {
            return Err(SbtError::SelfIntersection { c_gamma: curve.c_gamma });
        }
        Ok(curve)
    }

    /// Unit-length Fourier coefficients (in the raw parameter).
    pub fn modes(&self) -> &[FourierMode] {
        &self.modes
    }

    /// Length of the curve before normalization.
    pub fn raw_length(&self) -> f64 {
        self.raw_length
    }

    /// Always 1.
    pub fn total_length(&self) -> f64 {
        1.0
    }

    pub fn sample_count(&self) -> usize {
        self.arclength.len() - 1
    }

    /// Estimated `inf |X(s) - X(t)| / d_T(s, t)`.
    pub fn c_gamma(&self) -> f64 {
        self.c_gamma
    }

    /// Largest curvature found on a dense grid.
    pub fn kappa_max(&self) -> f64 {
        self.kappa_max
    }

    /// Raw parameter `u` at arclength `s` (wrapped into `[0, 1)`).
    pub fn param(&self, s: f64) -> f64 {
        let s = s.rem_euclid(1.0);
        let m = self.sample_count();
        let j = (self.arclength.partition_point(|&l| l <= s).max(1) - 1).min(m - 1);
        let (l0, l1) = (self.arclength[j], self.arclength[j + 1]);
        let h = l1 - l0;
        let du = 1.0 / m as f64;
        let u0 = j as f64 * du;
        let t = (s - l0) / h;
        let (m0, m1) = (h / self.speed[j], h / self.speed[j + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let mut u = u0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + (u0 + du) * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2);
        let residual = l0 + speed_integral(&self.modes, u0, u) - s;
        u -= residual / fourier_d1(&self.modes, u).norm();
        u
    }

    /// `X(s)`, `X'(s)` and `X''(s)` in arclength.
    pub fn point(&self, s: f64) -> CurvePoint {
        let raw = fourier_eval(&self.modes, self.param(s));
        let speed = raw.d1.norm();
        let tangent = raw.d1 / speed;
        let d2 = (raw.d2 - tangent * tangent.dot(&raw.d2)) / (speed * speed);
        CurvePoint {
            x: raw.x,
            d1: tangent,
            d2,
        }
    }

    /// `X`, `e_t = X'` or `X''` for `order` 0, 1, 2.
    pub fn eval(&self, s: f64, order: u8) -> Vec3 {
        let p = self.point(s);
        match order {
            0 => p.x,
            1 => p.d1,
            _ => p.d2,
        }
    }

    pub fn position(&self, s: f64) -> Vec3 {
        fourier_eval(&self.modes, self.param(s)).x
    }

    /// Curvature `|X''(s)|`.
    pub fn curvature(&self, s: f64) -> f64 {
        self.point(s).d2.norm()
    }

    fn scan_kappa_max(&self, n: usize) -> f64 {
        let k = par::map_range(n, |i| self.curvature(i as f64 / n as f64));
        k.into_iter().fold(0.0, f64::max)
    }

    fn chord_ratio(&self, s: f64, t: f64) -> f64 {
        let d = (s - t).rem_euclid(1.0);
        let dt = d.min(1.0 - d);
        if dt <= 0.0 {
            return 1.0;
        }
        (self.position(s) - self.position(t)).norm() / dt
    }

    /// Brute-force chord/arc minimum on a 2048² grid, then a shrinking
    /// pattern search around the best pair. An estimate, not a certified
    /// infimum.
    fn estimate_c_gamma(&self) -> f64 {
        let n = CHORD_GRID;
        let pts: Vec<Vec3> = par::map_range(n, |i| self.position(i as f64 / n as f64));
        let rows = par::map_range(n, |i| {
            let mut best = (f64::INFINITY, 0usize);
            for j in (i + 1)..n {
                let d = (j - i) as f64 / n as f64;
                let ratio = (pts[i] - pts[j]).norm() / d.min(1.0 - d);
                if ratio < best.0 {
                    best = (ratio, j);
                }
            }
            best
        });
        let (mut best, mut s, mut t) = (f64::INFINITY, 0.0, 0.5);
        for (i, (r, j)) in rows.into_iter().enumerate() {
            if r < best {
                best = r;
                s = i as f64 / n as f64;
                t = j as f64 / n as f64;
            }
        }
        let mut step = 1.0 / n as f64;
        while step > 1e-9 {
            let mut improved = false;
            for (ds, dt) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
                let (s2, t2) = (s + ds * step, t + dt * step);
                let r = self.chord_ratio(s2, t2);
                if r < best {
                    best = r;
                    s = s2;
                    t = t2;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best
    }

    /// Closest arclength to `x` and the distance: coarse scan of 1024 nodes
    /// followed by safeguarded Newton on `|x - X(s)|²`.
    pub fn closest_point(&self, x: &Vec3) -> (f64, f64) {
        let n = CLOSEST_SCAN;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..n {
            let s = i as f64 / n as f64;
            let d2 = (x - self.position(s)).norm_squared();
            if d2 < best.0 {
                best = (d2, s);
            }
        }
        let mut s = best.1;
        let h = 1.0 / n as f64;
        for _ in 0..50 {
            let p = self.point(s);
            let diff = p.x - x;
            let g = diff.dot(&p.d1);
            let gp = 1.0 + diff.dot(&p.d2);
            let step = if gp > 0.0 { (g / gp).clamp(-h, h) } else { -g.signum() * 0.25 * h };
            s -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let s = s.rem_euclid(1.0);
        let d = (x - self.position(s)).norm();
        if d <= best.0.sqrt() {
            (s, d)
        } else {
            (best.1, best.0.sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(radius: f64) -> Vec<FourierMode> {
        vec![FourierMode::new(1, [radius, 0.0, 0.0], [0.0, radius, 0.0])]
    }

    #[test]
    fn circle_is_rescaled_to_unit_length() {
        let c = Centerline::build(&circle(2.0), 256).unwrap();
        assert!((c.raw_length() - 4.0 * PI).abs() < 1e-12);
        let r = 1.0 / (2.0 * PI);
        for i in 0..20 {
            let s = i as f64 / 20.0 + 0.013;
            assert!((c.eval(s, 0).norm() - r).abs() < 1e-12);
            assert!((c.eval(s, 1).norm() - 1.0).abs() < 1e-12);
            assert!((c.eval(s, 2).norm() - 2.0 * PI).abs() < 1e-9);
        }
        assert_eq!(c.eval(0.0, 0), c.eval(1.0, 0));
    }

    #[test]
    fn circle_c_gamma() {
        let c = Centerline::build(&circle(1.0), 256).unwrap();
        assert!((c.c_gamma() - 2.0 / PI).abs() < 1e-9, "{}", c.c_gamma());
        assert!((c.kappa_max() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn arclength_map_is_accurate_for_uneven_speed() {
        let modes = vec![
            FourierMode::new(1, [1.0, 0.0, 0.0], [0.0, 0.6, 0.0]),
            FourierMode::new(2, [0.0, 0.0, 0.2], [0.15, 0.0, 0.0]),
        ];
        let c = Centerline::build(&modes, 256).unwrap();
        for i in 0..200 {
            let s = i as f64 / 200.0 + 0.0021;
            let t = c.eval(s, 1);
            assert!((t.norm() - 1.0).abs() < 1e-12);
            // finite-difference speed check on the arclength map
            let h = 1e-6;
            let fd = (c.eval(s + h, 0) - c.eval(s - h, 0)) / (2.0 * h);
            assert!((fd - t).norm() < 1e-8, "s = {s}: {}", (fd - t).norm());
        }
    }

    #[test]
    fn rebuild_is_identity() {
        let modes = vec![
            FourierMode::new(1, [1.0, 0.0, 0.1], [0.0, 1.3, 0.0]),
            FourierMode::new(2, [0.0, 0.1, 0.3], [0.2, 0.0, 0.0]),
        ];
        let a = Centerline::build(&modes, 128).unwrap();
        let b = Centerline::build(a.modes(), 128).unwrap();
        assert!((b.raw_length() - 1.0).abs() < 1e-10);
        for i in 0..50 {
            let s = i as f64 / 50.0;
            assert!((a.eval(s, 0) - b.eval(s, 0)).norm() < 1e-10);
        }
    }

    #[test]
    fn degenerate_and_self_intersecting_curves_fail() {
        let zero = vec![FourierMode::new(1, [0.0; 3], [0.0; 3])];
        assert!(matches!(Centerline::build(&zero, 128), Err(SbtError::DegenerateCurve { .. })));
        // figure eight in the plane crosses itself at the origin
        let eight = vec![
            FourierMode::new(1, [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]),
            FourierMode::new(2, [0.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
        ];
        assert!(matches!(Centerline::build(&eight, 128), Err(SbtError::SelfIntersection { .. })));
        assert!(Centerline::build(&circle(1.0), 32).is_err());
    }

    #[test]
    fn closest_point_on_circle() {
        let c = Centerline::build(&circle(1.0), 256).unwrap();
        let r = 1.0 / (2.0 * PI);
        let s0 = 0.3141;
        let (sn, cs) = (2.0 * PI * s0).sin_cos();
        let x = Vec3::new((r + 0.01) * cs, (r + 0.01) * sn, 0.002);
        let (s, d) = c.closest_point(&x);
        assert!((s - s0).abs() < 1e-12);
        assert!((d - (0.01f64.powi(2) + 0.002f64.powi(2)).sqrt()).abs() < 1e-12);
    }
}
