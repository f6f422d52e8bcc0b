//! Boundary polylines for plotting regions.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::constructors::{CircleParams, EllipseParams};
use super::exact::cardioid_radius;
use super::lmi::LmiRegion;

/// Samples per closed boundary.
pub const BOUNDARY_POINTS: usize = 720;

fn angles(count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| -PI + 2.0 * PI * i as f64 / (count - 1) as f64)
}

pub fn cardioid(zeta_min: f64) -> Vec<Complex64> {
    angles(BOUNDARY_POINTS)
        .map(|t| Complex64::from_polar(cardioid_radius(zeta_min, t), t))
        .collect()
}

pub fn circle(p: &CircleParams) -> Vec<Complex64> {
    angles(BOUNDARY_POINTS)
        .map(|t| Complex64::new(p.c, 0.0) + Complex64::from_polar(p.r, t))
        .collect()
}

pub fn ellipse(p: &EllipseParams) -> Vec<Complex64> {
    angles(BOUNDARY_POINTS)
        .map(|t| Complex64::new(p.c + p.a * t.cos(), p.b * t.sin()))
        .collect()
}

/// Two rays at `±theta_max` from the origin out to the unit circle.
pub fn conic(theta_max: f64) -> Vec<Complex64> {
    let half = BOUNDARY_POINTS / 2;
    let ray = |sign: f64, i: usize| Complex64::from_polar(i as f64 / (half - 1) as f64, sign * theta_max);
    (0..half)
        .rev()
        .map(|i| ray(1.0, i))
        .chain((0..half).map(|i| ray(-1.0, i)))
        .collect()
}

pub fn unit_circle() -> Vec<Complex64> {
    circle(&CircleParams { c: 0.0, r: 1.0 })
}

/// Boundary of an arbitrary LMI region, traced along rays from an interior
/// real point and clipped to `|z − center| ≤ reach`.
///
/// Valid for any convex region. Returns `None` when no real point is
/// strictly inside.
pub fn outline(region: &LmiRegion, reach: f64, count: usize) -> Option<Vec<Complex64>> {
    let center = Complex64::new(region.real_center()?, 0.0);
    let inside = |z: Complex64| region.min_eig(z) >= 0.0;
    let points = angles(count.max(3))
        .map(|t| {
            let dir = Complex64::from_polar(1.0, t);
            if inside(center + dir * reach) {
                return center + dir * reach;
            }
            let (mut lo, mut hi) = (0.0, reach);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if inside(center + dir * mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            center + dir * lo
        })
        .collect();
    Some(points)
}
