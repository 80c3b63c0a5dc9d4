mod common;

use sbt_core::residuals::{centerline_residual, cross_section, force_components, force_sbt, theta_average, velocity_residual};
use sbt_core::sbt::{centerline_velocity_kr, surface_velocity};
use sbt_core::{ForceDensity, QuadratureSpec, Vec3};

use common::*;

#[test]
fn axial_force_on_circle_is_recovered_exactly() {
    // total traction on the tube equals the enclosed point-force total, and
    // by symmetry it is the same on every cross section
    let frame = circle();
    let f = ForceDensity::constant(Vec3::z());
    for eps in [1e-2, 5e-3, 2.5e-3] {
        let spec = QuadratureSpec::for_eps(eps);
        let fsb = force_sbt(&frame, &f, eps, 0.3, 64, &spec).unwrap();
        assert!((fsb - Vec3::z()).norm() < 1e-12, "{eps}: {:e}", (fsb - Vec3::z()).norm());
    }
}

#[test]
fn force_residual_decreases_with_eps() {
    let frame = circle();
    let f = ForceDensity::constant(Vec3::new(1.0, 0.5, 1.0));
    let res: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&eps| (force_sbt(&frame, &f, eps, 0.3, 64, &QuadratureSpec::for_eps(eps)).unwrap() - f.eval(0.3)).norm())
        .collect();
    assert!(res[0] > res[1] && res[1] > res[2]);
    // at least first order: halving eps at least halves the residual
    assert!(res[1] < 0.5 * res[0] && res[2] < 0.5 * res[1]);
}

#[test]
fn doubling_theta_resolution_leaves_force_unchanged() {
    let frame = knot();
    let f = harmonic();
    let eps = 2e-3;
    let spec = QuadratureSpec::for_eps(eps);
    let a = force_sbt(&frame, &f, eps, 0.7, 64, &spec).unwrap();
    let b = force_sbt(&frame, &f, eps, 0.7, 128, &spec).unwrap();
    assert!((a - b).norm() < 1e-9 * a.norm(), "{:e}", (a - b).norm() / a.norm());
}

#[test]
fn components_close_on_the_force() {
    let frame = knot();
    let f = harmonic();
    let eps = 2e-3;
    let spec = QuadratureSpec::for_eps(eps);
    for s in [0.0, 0.25, 0.61] {
        let total = force_sbt(&frame, &f, eps, s, 64, &spec).unwrap();
        let parts = force_components(&frame, &f, eps, s, 64, &spec).unwrap();
        assert!((parts.total() - total).norm() <= 1e-10 * total.norm());
        let report = cross_section(&frame, &f, eps, s, 64, &spec).unwrap();
        assert!(report.closure_error() <= 1e-10);
        assert_eq!(report.f_sb, total);
    }
}

#[test]
fn pressure_and_first_components_approach_their_limits() {
    let frame = circle();
    let f = harmonic();
    let s = 0.2;
    let at = frame.at(s);
    let fs = f.eval(s);
    let ft = at.tangent * at.tangent.dot(&fs);
    let dev = |eps: f64| {
        let c = force_components(&frame, &f, eps, s, 64, &QuadratureSpec::for_eps(eps)).unwrap();
        [
            (c.pressure - (fs - ft) * 0.5).norm(),
            (c.one - (fs + ft) * 0.5).norm(),
            c.two.norm(),
            c.three.norm(),
            c.four.norm(),
        ]
    };
    let (a, b) = (dev(1e-2), dev(2.5e-3));
    for j in 0..5 {
        assert!(b[j] < 0.5 * a[j] || b[j] < 1e-12, "component {j}: {} -> {}", a[j], b[j]);
    }
}

#[test]
fn theta_residual_has_zero_mean() {
    let frame = knot();
    let f = harmonic();
    let eps = 2e-3;
    let (ur, max) = velocity_residual(&frame, &f, eps, 0.4, 64, &QuadratureSpec::for_eps(eps)).unwrap();
    assert!(theta_average(&ur).unwrap().norm() < 1e-12 * max.max(1.0));
    assert!(max > 0.0);
}

#[test]
fn symmetric_theta_residual_matches_finer_grid() {
    let frame = circle();
    let f = ForceDensity::constant(Vec3::z());
    let eps = 1e-2;
    let spec = QuadratureSpec::for_eps(eps);
    let (_, coarse) = velocity_residual(&frame, &f, eps, 0.1, 64, &spec).unwrap();
    let (_, fine) = velocity_residual(&frame, &f, eps, 0.1, 256, &spec).unwrap();
    assert!(coarse < 0.1 * surface_velocity(&frame, &f, eps, 0.1, 0.0, &spec).unwrap().norm());
    assert!((coarse - fine).abs() < 1e-2 * fine);
}

#[test]
fn centerline_residual_is_difference_of_velocities() {
    let frame = knot();
    let f = harmonic();
    let eps = 2e-3;
    let spec = QuadratureSpec::for_eps(eps);
    let r = centerline_residual(&frame, &f, eps, 0.33, 1.2, &spec).unwrap();
    let u = surface_velocity(&frame, &f, eps, 0.33, 1.2, &spec).unwrap();
    let uc = centerline_velocity_kr(&frame, &f, eps, 0.33, &spec).unwrap();
    assert_eq!(r, u - uc);
    assert_eq!(centerline_residual(&frame, &ForceDensity::zero(), eps, 0.33, 1.2, &spec).unwrap(), Vec3::zeros());
}

#[test]
fn circle_force_is_rotation_invariant() {
    let frame = circle();
    let f = ForceDensity::constant(Vec3::z());
    let eps = 1e-2;
    let spec = QuadratureSpec::for_eps(eps);
    let a = cross_section(&frame, &f, eps, 0.0, 64, &spec).unwrap();
    for s in [0.125, 0.5, 0.9] {
        let b = cross_section(&frame, &f, eps, s, 64, &spec).unwrap();
        assert!((a.f_sb - b.f_sb).norm() < 1e-10);
        assert!((a.ur_max - b.ur_max).abs() < 1e-10 * a.ur_max);
    }
}

#[test]
fn small_theta_grids_rejected() {
    let frame = circle();
    let f = ForceDensity::constant(Vec3::z());
    let spec = QuadratureSpec::for_eps(1e-2);
    assert!(force_sbt(&frame, &f, 1e-2, 0.0, 16, &spec).is_err());
    assert!(theta_average(&[Vec3::zeros(); 8]).is_err());
}
