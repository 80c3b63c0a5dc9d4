//! Prescribed line force density along the centerline.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbtError};
use crate::geometry::FourierMode;
use crate::Vec3;

/// Grid used for the `C¹` norm.
const NORM_GRID: usize = 4096;

/// 1-periodic force density `f(s)` given by Fourier modes in arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceDensity {
    pub modes: Vec<FourierMode>,
}

impl ForceDensity {
    pub fn new(modes: Vec<FourierMode>) -> Result<Self> {
        if modes
            .iter()
            .any(|m| m.cos.iter().chain(&m.sin).any(|v| !v.is_finite()))
        {
            return Err(SbtError::InvalidInput("non-finite force coefficient".into()));
        }
        Ok(ForceDensity { modes })
    }

    pub fn zero() -> Self {
        ForceDensity { modes: Vec::new() }
    }

    pub fn constant(f: Vec3) -> Self {
        ForceDensity {
            modes: vec![FourierMode::new(0, f.into(), [0.0; 3])],
        }
    }

    /// Trigonometric interpolant of `n` uniform samples `f(j/n)`.
    pub fn from_samples(samples: &[Vec3]) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(SbtError::InvalidInput("no force samples".into()));
        }
        let half = n / 2;
        let mut modes = Vec::with_capacity(half + 1);
        for k in 0..=half {
            let mut a = Vec3::zeros();
            let mut b = Vec3::zeros();
            for (j, v) in samples.iter().enumerate() {
                let (s, c) = (2.0 * PI * ((k * j) % n) as f64 / n as f64).sin_cos();
                a += v * c;
                b += v * s;
            }
            let nyquist = n.is_multiple_of(2) && k == half;
            let w = if k == 0 || nyquist { 1.0 } else { 2.0 } / n as f64;
            let b = if nyquist { Vec3::zeros() } else { b * w };
            modes.push(FourierMode::new(k as u32, (a * w).into(), b.into()));
        }
        ForceDensity::new(modes)
    }

    pub fn eval(&self, s: f64) -> Vec3 {
        let mut v = Vec3::zeros();
        for m in &self.modes {
            if m.k == 0 {
                v += Vec3::from(m.cos);
                continue;
            }
            let (sn, cs) = (2.0 * PI * m.k as f64 * s).sin_cos();
            v += Vec3::from(m.cos) * cs + Vec3::from(m.sin) * sn;
        }
        v
    }

    pub fn derivative(&self, s: f64) -> Vec3 {
        let mut v = Vec3::zeros();
        for m in self.modes.iter().filter(|m| m.k > 0) {
            let w = 2.0 * PI * m.k as f64;
            let (sn, cs) = (w * s).sin_cos();
            v += (Vec3::from(m.sin) * cs - Vec3::from(m.cos) * sn) * w;
        }
        v
    }

    /// `max|f| + max|f'|` over a dense uniform grid.
    pub fn c1_norm(&self) -> f64 {
        let (mut a, mut b) = (0.0f64, 0.0f64);
        for j in 0..NORM_GRID {
            let s = j as f64 / NORM_GRID as f64;
            a = a.max(self.eval(s).norm());
            b = b.max(self.derivative(s).norm());
        }
        a + b
    }

    pub fn is_zero(&self) -> bool {
        self.modes
            .iter()
            .all(|m| m.cos.iter().chain(&m.sin).all(|&v| v == 0.0))
    }

    /// `∫_T f ds`.
    pub fn total(&self) -> Vec3 {
        self.modes
            .iter()
            .filter(|m| m.k == 0)
            .map(|m| Vec3::from(m.cos))
            .sum()
    }
}
