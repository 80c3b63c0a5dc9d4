use std::f64::consts::PI;
use std::io::Write;

use super::centerline::Centerline;
use crate::error::{Result, SbtError};
use crate::Vec3;

pub const MIN_FRAME_SAMPLES: usize = 128;

/// RK4 steps per frame sample interval.
const SUBSTEPS: usize = 8;
/// Orthonormality drift tolerated in one step before re-orthonormalization.
const DRIFT_LIMIT: f64 = 1e-8;

/// Frame quantities at one arclength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameAt {
    pub x: Vec3,
    pub tangent: Vec3,
    pub normal1: Vec3,
    pub normal2: Vec3,
    /// `X''(s)`
    pub second: Vec3,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl FrameAt {
    /// `e_ρ = cos θ e_n1 + sin θ e_n2`.
    pub fn e_rho(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.normal1 * c + self.normal2 * s
    }

    /// `e_θ = -sin θ e_n1 + cos θ e_n2`.
    pub fn e_theta(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.normal2 * c - self.normal1 * s
    }

    /// `κ̂ = κ1 cos θ + κ2 sin θ`.
    pub fn kappa_hat(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.kappa1 * c + self.kappa2 * s
    }
}

/// Real trigonometric interpolant of uniformly sampled periodic vectors.
#[derive(Debug, Clone)]
struct TrigInterp {
    /// `(a_k, b_k)` for `k = 0..=n/2`, scaled so that
    /// `v(s) = Σ a_k cos(2πks) + b_k sin(2πks)`.
    coeffs: Vec<(Vec3, Vec3)>,
}

impl TrigInterp {
    fn new(samples: &[Vec3]) -> Self {
        let n = samples.len();
        let half = n / 2;
        let mut coeffs = Vec::with_capacity(half + 1);
        for k in 0..=half {
            let mut a = Vec3::zeros();
            let mut b = Vec3::zeros();
            for (j, v) in samples.iter().enumerate() {
                let ang = 2.0 * PI * ((k * j) % n) as f64 / n as f64;
                let (s, c) = ang.sin_cos();
                a += v * c;
                b += v * s;
            }
            let w = if k == 0 || (n.is_multiple_of(2) && k == half) { 1.0 } else { 2.0 };
            coeffs.push((a * (w / n as f64), b * (w / n as f64)));
        }
        if n.is_multiple_of(2) {
            // the Nyquist sine term is not representable
            coeffs[half].1 = Vec3::zeros();
        }
        TrigInterp { coeffs }
    }

    fn eval(&self, s: f64) -> Vec3 {
        let (sn, cs) = (2.0 * PI * s).sin_cos();
        let (mut c, mut sk) = (1.0, 0.0);
        let mut v = Vec3::zeros();
        for (k, (a, b)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                let c2 = c * cs - sk * sn;
                sk = sk * cs + c * sn;
                c = c2;
            }
            v += a * c + b * sk;
        }
        v
    }
}

/// Periodic orthonormal frame `(e_t, e_n1, e_n2)` along a centerline with
/// constant twist rate `κ3`, `|κ3| ≤ π`.
///
/// Built from a parallel-transported normal whose holonomy is spread evenly
/// over the loop. Off-grid queries interpolate the normals trigonometrically
/// and re-orthonormalize against the exact tangent.
#[derive(Debug, Clone)]
pub struct Frame {
    centerline: Centerline,
    tangent: Vec<Vec3>,
    normal1: Vec<Vec3>,
    normal2: Vec<Vec3>,
    kappa1: Vec<f64>,
    kappa2: Vec<f64>,
    kappa3: f64,
    kappa_max: f64,
    r_max: f64,
    holonomy: f64,
    closure_error: f64,
    interp1: TrigInterp,
}

/// Initial normal: the curvature direction at `s = 0` when it is defined,
/// otherwise the coordinate axis least aligned with the tangent, projected.
fn initial_normal(tangent: &Vec3, second: &Vec3) -> Vec3 {
    if second.norm() > 1e-8 {
        return second.normalize();
    }
    let mut axis = Vec3::x();
    for cand in [Vec3::y(), Vec3::z()] {
        if cand.dot(tangent).abs() < axis.dot(tangent).abs() {
            axis = cand;
        }
    }
    (axis - tangent * axis.dot(tangent)).normalize()
}

impl Frame {
    /// Builds the frame on `samples` uniform arclength nodes.
    pub fn build(centerline: &Centerline, samples: usize) -> Result<Frame> {
        if samples < MIN_FRAME_SAMPLES {
            return Err(SbtError::InvalidInput(format!(
                "frame needs at least {MIN_FRAME_SAMPLES} samples, got {samples}"
            )));
        }
        let c = centerline;
        let start = c.point(0.0);
        let mut v = initial_normal(&start.d1, &start.d2);
        let rhs = |s: f64, v: &Vec3| {
            let p = c.point(s);
            -p.d1 * v.dot(&p.d2)
        };

        // transported normal at s_j = j/N, j = 0..=N
        let steps = samples * SUBSTEPS;
        let h = 1.0 / steps as f64;
        let mut transported = Vec::with_capacity(samples + 1);
        transported.push(v);
        for step in 0..steps {
            let s = step as f64 * h;
            let k1 = rhs(s, &v);
            let k2 = rhs(s + 0.5 * h, &(v + k1 * (0.5 * h)));
            let k3 = rhs(s + 0.5 * h, &(v + k2 * (0.5 * h)));
            let k4 = rhs(s + h, &(v + k3 * h));
            v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            let t = c.eval(s + h, 1);
            let drift = v.dot(&t).abs().max((v.norm() - 1.0).abs());
            if !(drift <= DRIFT_LIMIT) {
                return Err(SbtError::IntegrationFailure { drift });
            }
            v = (v - t * v.dot(&t)).normalize();
            if (step + 1) % SUBSTEPS == 0 {
                transported.push(v);
            }
        }

        let t0 = start.d1;
        let n1_0 = transported[0];
        let n2_0 = t0.cross(&n1_0);
        let end = transported[samples];
        let holonomy = end.dot(&n2_0).atan2(end.dot(&n1_0));
        // rotating by φ(s) = κ3 s closes the frame; ±π are equivalent, take +π
        let kappa3 = if (holonomy.abs() - PI).abs() < 1e-14 { PI } else { 0.0 - holonomy };

        let mut tangent = Vec::with_capacity(samples + 1);
        let mut normal1 = Vec::with_capacity(samples + 1);
        let mut normal2 = Vec::with_capacity(samples + 1);
        let mut kappa1 = Vec::with_capacity(samples + 1);
        let mut kappa2 = Vec::with_capacity(samples + 1);
        for (j, tv) in transported.iter().enumerate() {
            let s = j as f64 / samples as f64;
            let p = c.point(s);
            let tw = p.d1.cross(tv);
            let (sn, cs) = (kappa3 * s).sin_cos();
            let n1 = tv * cs + tw * sn;
            let n2 = tw * cs - tv * sn;
            kappa1.push(p.d2.dot(&n1));
            kappa2.push(p.d2.dot(&n2));
            tangent.push(p.d1);
            normal1.push(n1);
            normal2.push(n2);
        }
        let closure_error = (normal1[samples] - normal1[0])
            .norm()
            .max((normal2[samples] - normal2[0]).norm());
        let interp1 = TrigInterp::new(&normal1[..samples]);
        let kappa_max = c.kappa_max();
        let r_max = (0.5 / kappa_max).min(0.25 * c.c_gamma());

        Ok(Frame {
            centerline: c.clone(),
            tangent,
            normal1,
            normal2,
            kappa1,
            kappa2,
            kappa3,
            kappa_max,
            r_max,
            holonomy,
            closure_error,
            interp1,
        })
    }

    pub fn centerline(&self) -> &Centerline {
        &self.centerline
    }

    /// Number of uniform samples `N` (grids carry `N + 1` entries, the last
    /// one at `s = 1`).
    pub fn sample_count(&self) -> usize {
        self.tangent.len() - 1
    }

    pub fn sample_s(&self, j: usize) -> f64 {
        j as f64 / self.sample_count() as f64
    }

    pub fn tangents(&self) -> &[Vec3] {
        &self.tangent
    }

    pub fn normals1(&self) -> &[Vec3] {
        &self.normal1
    }

    pub fn normals2(&self) -> &[Vec3] {
        &self.normal2
    }

    pub fn kappa1_samples(&self) -> &[f64] {
        &self.kappa1
    }

    pub fn kappa2_samples(&self) -> &[f64] {
        &self.kappa2
    }

    /// Constant twist rate of the frame.
    pub fn kappa3(&self) -> f64 {
        self.kappa3
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappa_max
    }

    /// Tube radius below which `X(s) + ρ e_ρ` is treated as one-to-one:
    /// `min(1/(2 κ_max), c_Γ/4)`.
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Largest admissible fiber radius (exclusive): `r_max/4`.
    pub fn eps_limit(&self) -> f64 {
        0.25 * self.r_max
    }

    /// Fails with [`SbtError::EpsilonTooLarge`] unless `0 < eps < r_max/4`.
    pub fn check_eps(&self, eps: f64) -> Result<()> {
        if eps > 0.0 && eps < self.eps_limit() {
            Ok(())
        } else {
            Err(SbtError::EpsilonTooLarge {
                eps,
                limit: self.eps_limit(),
            })
        }
    }

    /// Rotation angle of the parallel-transported normal after one loop.
    pub fn holonomy(&self) -> f64 {
        self.holonomy
    }

    /// Mismatch between the sampled normals at `s = 1` and `s = 0`.
    pub fn closure_error(&self) -> f64 {
        self.closure_error
    }

    /// Frame, curvature coefficients and position at any `s`.
    pub fn at(&self, s: f64) -> FrameAt {
        let s = s.rem_euclid(1.0);
        let p = self.centerline.point(s);
        let t = p.d1;
        let raw = self.interp1.eval(s);
        let n1 = (raw - t * raw.dot(&t)).normalize();
        let n2 = t.cross(&n1);
        FrameAt {
            x: p.x,
            tangent: t,
            normal1: n1,
            normal2: n2,
            second: p.d2,
            kappa1: p.d2.dot(&n1),
            kappa2: p.d2.dot(&n2),
        }
    }

    /// Writes the sampled frame as CSV with a `# kappa3=<value>` header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# kappa3={:.17e}", self.kappa3)?;
        writeln!(
            out,
            "s,etx,ety,etz,en1x,en1y,en1z,en2x,en2y,en2z,kappa1,kappa2"
        )?;
        for j in 0..self.sample_count() {
            let (t, n1, n2) = (self.tangent[j], self.normal1[j], self.normal2[j]);
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.sample_s(j),
                t[0], t[1], t[2], n1[0], n1[1], n1[2], n2[0], n2[1], n2[2],
                self.kappa1[j],
                self.kappa2[j]
            )?;
        }
        Ok(())
    }
}
