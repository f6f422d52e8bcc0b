//! The five region constructors used to encode step-response priors.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::lmi::LmiRegion;
use crate::error::{domain, Result, SidError};

/// Disk `|z − c| ≤ r` with its center on the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleParams {
    pub c: f64,
    pub r: f64,
}

/// Ellipse `((x − c)/a)² + (y/b)² ≤ 1`; `e = 1/a`, `f = 1/b`.
///
/// `mu` is set only for the rescaled (conservative) ellipse, whose rightmost
/// point sits on `z = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseParams {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    pub e: f64,
    pub f: f64,
    pub mu: Option<f64>,
}

impl EllipseParams {
    fn new(c: f64, a: f64, b: f64, mu: Option<f64>) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return domain(format!("ellipse semi-axes must be positive (a = {a}, b = {b})"));
        }
        Ok(Self { c, a, b, e: 1.0 / a, f: 1.0 / b, mu })
    }

    /// Distance from the center to the boundary at polar angle `angle`.
    pub fn polar_radius(&self, angle: f64) -> f64 {
        self.a * self.b / (self.a.powi(2) * angle.sin().powi(2) + self.b.powi(2) * angle.cos().powi(2)).sqrt()
    }

    /// Semi-axis along the real axis exceeds the imaginary one.
    pub fn is_horizontal(&self) -> bool {
        self.a > self.b
    }
}

/// Cone half-angle `β = acos(ζ)`, center and radius of the inner circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardioidGeometry {
    pub beta: f64,
    pub c_max: f64,
    pub r_max: f64,
}

impl CardioidGeometry {
    pub fn new(zeta_min: f64) -> Result<Self> {
        if !(zeta_min > 0.0 && zeta_min < 1.0) {
            return domain(format!(
                "minimum damping ratio must lie in (0, 1), got {zeta_min}"
            ));
        }
        let beta = zeta_min.acos();
        let gamma = (-beta / beta.tan()).exp();
        Ok(Self {
            beta,
            c_max: gamma * beta.cos(),
            r_max: gamma * beta.sin(),
        })
    }

    /// Leftmost cardioid point magnitude, `e^{−π/tan β}`.
    pub fn tail(&self) -> f64 {
        (-PI / self.beta.tan()).exp()
    }

    /// Real semi-axis of the inner ellipse.
    pub fn ellipse_a(&self) -> f64 {
        self.c_max + self.tail()
    }
}

pub fn circle(c: f64, r: f64, label: impl Into<String>) -> Result<(LmiRegion, CircleParams)> {
    if !(r > 0.0) {
        return domain(format!("circle radius must be positive, got {r}"));
    }
    let lambda = DMatrix::from_row_slice(2, 2, &[r, -c, -c, r]);
    let beta = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    Ok((LmiRegion::new(lambda, beta, label)?, CircleParams { c, r }))
}

pub fn ellipse(params: &EllipseParams, label: impl Into<String>) -> Result<LmiRegion> {
    let EllipseParams { c, e, f, .. } = *params;
    let lambda = DMatrix::from_row_slice(2, 2, &[1.0, -e * c, -e * c, 1.0]);
    let beta = DMatrix::from_row_slice(2, 2, &[0.0, (e - f) / 2.0, (e + f) / 2.0, 0.0]);
    LmiRegion::new(lambda, beta, label)
}

/// Unit disk: every eigenvalue stable.
pub fn stability_circle() -> LmiRegion {
    circle(0.0, 1.0, "stability").expect("unit circle is well formed").0
}

/// Circle inscribed in the constant-damping cardioid of `zeta_min`.
pub fn cardioid_circle(zeta_min: f64) -> Result<(LmiRegion, CircleParams)> {
    let g = CardioidGeometry::new(zeta_min)?;
    circle(g.c_max, g.r_max, format!("cardioid-circle(ζ={zeta_min})"))
}

/// Inner ellipse approximation of the cardioid of `zeta_min`.
pub fn cardioid_ellipse_inner(zeta_min: f64) -> Result<(LmiRegion, EllipseParams)> {
    let g = CardioidGeometry::new(zeta_min)?;
    let p = EllipseParams::new(g.c_max, g.ellipse_a(), g.r_max, None)?;
    Ok((ellipse(&p, format!("inner-ellipse(ζ={zeta_min})"))?, p))
}

/// Inner ellipse rescaled along the real axis so its rightmost point is `z = 1`.
pub fn cardioid_ellipse_conservative(zeta_min: f64) -> Result<(LmiRegion, EllipseParams)> {
    let g = CardioidGeometry::new(zeta_min)?;
    let a = g.ellipse_a();
    let mu = 1.0 / (a + g.c_max);
    let p = EllipseParams::new(g.c_max * mu, a * mu, g.r_max, Some(mu))?;
    Ok((ellipse(&p, format!("conservative-ellipse(ζ={zeta_min})"))?, p))
}

/// Sector `tan(θ) Re z ≥ |Im z|` around the positive real axis.
pub fn conic_region(theta_max: f64) -> Result<LmiRegion> {
    if theta_max > FRAC_PI_2 {
        return Err(SidError::SamplingRate(format!(
            "sector angle {theta_max:.4} rad exceeds π/2; sample at least four times per \
             damped period (Ts ≤ Td_max/4)"
        )));
    }
    if !(theta_max > 0.0) {
        return domain(format!("sector angle must be positive, got {theta_max}"));
    }
    let (s, c) = theta_max.sin_cos();
    let beta = DMatrix::from_row_slice(2, 2, &[s, -c, c, s]);
    LmiRegion::new(DMatrix::zeros(2, 2), beta, format!("conic(θ={theta_max:.6})"))
}

/// Disk of radius `e^{−ζwn·ts}` centered at the origin.
pub fn settling_circle(zeta_wn_min: f64, ts: f64) -> Result<(LmiRegion, CircleParams)> {
    if !(zeta_wn_min > 0.0) {
        return domain(format!("ζwn lower bound must be positive, got {zeta_wn_min}"));
    }
    if !(ts > 0.0) {
        return Err(SidError::SamplingPeriod(ts));
    }
    circle(
        0.0,
        (-zeta_wn_min * ts).exp(),
        format!("settling(ζwn={zeta_wn_min}, ts={ts})"),
    )
}

/// Damping ratio at which the inner ellipse turns from vertical to horizontal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalDamping {
    pub zeta: f64,
    /// Cone half-angle in radians.
    pub beta: f64,
}

/// `a(β) − b(β)` of the inner ellipse, written on the cone angle.
fn axis_gap(beta: f64) -> f64 {
    let gamma = (-beta / beta.tan()).exp();
    gamma * beta.cos() + (-PI / beta.tan()).exp() - gamma * beta.sin()
}

/// Root of `a = b` on the cone angle, by bisection to a 1e-12 bracket.
pub fn critical_zeta() -> CriticalDamping {
    let (mut lo, mut hi) = (0.05, FRAC_PI_2 - 1e-3);
    // axis_gap(lo) > 0 (horizontal), axis_gap(hi) < 0 (vertical)
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if axis_gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    CriticalDamping { zeta: beta.cos(), beta }
}
