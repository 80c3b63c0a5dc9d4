//! Free-space Stokes singularities and their gradients.
//!
//! `R` is always the vector from the source point to the field point. The
//! checked entry points reject `|R| < 1e-14`; everything evaluated by this
//! crate sits at least a fiber radius away from the centerline, so no
//! regularization is applied.

use crate::error::{Result, SbtError};
use crate::{Mat3, Vec3};

/// Below this distance kernels report [`SbtError::SingularPoint`].
pub const SINGULAR_RADIUS: f64 = 1e-14;

/// Derivatives of a 3x3 kernel: `self.0[k][(i, j)] = d/dR_k M_ij`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grad3(pub [Mat3; 3]);

impl Grad3 {
    pub fn zeros() -> Self {
        Grad3([Mat3::zeros(); 3])
    }

    /// `d/dR_k M_ij`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.0[k][(i, j)]
    }

    /// Contracts the matrix index `j` with `f`, giving `G_ik = d/dR_k (M f)_i`.
    pub fn apply(&self, f: &Vec3) -> Mat3 {
        let mut g = Mat3::zeros();
        for k in 0..3 {
            let col = self.0[k] * f;
            g.set_column(k, &col);
        }
        g
    }
}

fn checked_norm(r: &Vec3) -> Result<f64> {
    let n = r.norm();
    if n < SINGULAR_RADIUS || !n.is_finite() {
        return Err(SbtError::SingularPoint { norm: n });
    }
    Ok(n)
}

/// Stokeslet `I/|R| + R R^T/|R|^3`.
pub fn stokeslet(r: &Vec3) -> Result<Mat3> {
    let n = checked_norm(r)?;
    Ok(Mat3::identity() / n + r * r.transpose() / (n * n * n))
}

/// Doublet `I/|R|^3 - 3 R R^T/|R|^5`, half the Laplacian of the Stokeslet.
pub fn doublet(r: &Vec3) -> Result<Mat3> {
    let n = checked_norm(r)?;
    let n3 = n * n * n;
    Ok(Mat3::identity() / n3 - r * r.transpose() * (3.0 / (n3 * n * n)))
}

/// Stokeslet pressure vector `R/|R|^3`.
pub fn pressure_kernel(r: &Vec3) -> Result<Vec3> {
    let n = checked_norm(r)?;
    Ok(r / (n * n * n))
}

/// `d/dR_k S_ij = (-δ_ij R_k + δ_ik R_j + δ_jk R_i)/|R|^3 - 3 R_i R_j R_k/|R|^5`.
pub fn grad_stokeslet(r: &Vec3) -> Result<Grad3> {
    let n = checked_norm(r)?;
    let inv3 = 1.0 / (n * n * n);
    let inv5 = inv3 / (n * n);
    let mut g = Grad3::zeros();
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut v = -3.0 * r[i] * r[j] * r[k] * inv5;
                if i == j {
                    v -= r[k] * inv3;
                }
                if i == k {
                    v += r[j] * inv3;
                }
                if j == k {
                    v += r[i] * inv3;
                }
                g.0[k][(i, j)] = v;
            }
        }
    }
    Ok(g)
}

/// `d/dR_k D_ij = -3(δ_ij R_k + δ_ik R_j + δ_jk R_i)/|R|^5 + 15 R_i R_j R_k/|R|^7`.
pub fn grad_doublet(r: &Vec3) -> Result<Grad3> {
    let n = checked_norm(r)?;
    let inv5 = 1.0 / n.powi(5);
    let inv7 = inv5 / (n * n);
    let mut g = Grad3::zeros();
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut v = 15.0 * r[i] * r[j] * r[k] * inv7;
                if i == j {
                    v -= 3.0 * r[k] * inv5;
                }
                if i == k {
                    v -= 3.0 * r[j] * inv5;
                }
                if j == k {
                    v -= 3.0 * r[i] * inv5;
                }
                g.0[k][(i, j)] = v;
            }
        }
    }
    Ok(g)
}

/// Everything the field evaluators need from one source point, already
/// contracted with the force vector. No singularity check.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Contracted {
    /// `S f`
    pub s_f: Vec3,
    /// `D f`
    pub d_f: Vec3,
    /// `R·f/|R|^3`
    pub p: f64,
    /// `d/dR_k (S f)_i`
    pub grad_s_f: Mat3,
    /// `d/dR_k (D f)_i`
    pub grad_d_f: Mat3,
}

#[inline]
pub(crate) fn contract_value(r: &Vec3, f: &Vec3) -> (Vec3, Vec3, f64) {
    let n2 = r.norm_squared();
    let n = n2.sqrt();
    let inv1 = 1.0 / n;
    let inv3 = inv1 / n2;
    let inv5 = inv3 / n2;
    let rf = r.dot(f);
    let s_f = f * inv1 + r * (rf * inv3);
    let d_f = f * inv3 - r * (3.0 * rf * inv5);
    (s_f, d_f, rf * inv3)
}

#[inline]
pub(crate) fn contract_all(r: &Vec3, f: &Vec3) -> Contracted {
    let n2 = r.norm_squared();
    let n = n2.sqrt();
    let inv1 = 1.0 / n;
    let inv3 = inv1 / n2;
    let inv5 = inv3 / n2;
    let inv7 = inv5 / n2;
    let rf = r.dot(f);
    let s_f = f * inv1 + r * (rf * inv3);
    let d_f = f * inv3 - r * (3.0 * rf * inv5);
    // outer products f R^T, R f^T, R R^T
    let f_rt = f * r.transpose();
    let r_ft = r * f.transpose();
    let r_rt = r * r.transpose();
    let ident = Mat3::identity();
    let grad_s_f = (-f_rt + ident * rf + r_ft) * inv3 - r_rt * (3.0 * rf * inv5);
    let grad_d_f = (f_rt + ident * rf + r_ft) * (-3.0 * inv5) + r_rt * (15.0 * rf * inv7);
    Contracted {
        s_f,
        d_f,
        p: rf * inv3,
        grad_s_f,
        grad_d_f,
    }
}
