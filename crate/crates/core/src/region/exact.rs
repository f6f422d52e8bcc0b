//! Exact (possibly non-convex) z-plane images of second-order transient requirements.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SidError};

/// Continuous-time coordinates of a discrete pole under `z = e^{s·ts}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZPlaneCoords {
    pub zeta: f64,
    /// Damped frequency, rad/s.
    pub wd: f64,
    /// Decay rate `ζ·wn`, rad/s.
    pub zeta_wn: f64,
}

impl ZPlaneCoords {
    /// Real poles (no oscillation) report `ζ = 1`.
    pub fn is_overdamped(&self) -> bool {
        self.wd == 0.0
    }
}

/// Inverse of the pole map, using the principal branch of `arg z`.
pub fn zplane_coords(z: Complex64, ts: f64) -> Result<ZPlaneCoords> {
    if !(ts > 0.0) {
        return Err(SidError::SamplingPeriod(ts));
    }
    let r = z.norm();
    if r == 0.0 {
        return domain("z = 0 has no finite continuous-time preimage");
    }
    if r >= 1.0 {
        return domain(format!("|z| = {r} is not strictly inside the unit disk"));
    }
    let zeta_wn = -r.ln() / ts;
    let wd = z.arg().abs() / ts;
    let zeta = if wd == 0.0 { 1.0 } else { zeta_wn / zeta_wn.hypot(wd) };
    Ok(ZPlaneCoords { zeta, wd, zeta_wn })
}

/// Membership in the exact cardioid `{ e^{s·ts} : ζ(s) ≥ zeta_min }`.
///
/// The sampling period cancels: only the ratio of decay to rotation per
/// sample matters. Real `z` in `[0, 1)` is always inside.
pub fn exact_cardioid_contains(zeta_min: f64, z: Complex64) -> Result<bool> {
    if !(zeta_min > 0.0 && zeta_min < 1.0) {
        return domain(format!("minimum damping ratio must lie in (0, 1), got {zeta_min}"));
    }
    if z.norm() >= 1.0 {
        return domain(format!("|z| = {} is not strictly inside the unit disk", z.norm()));
    }
    if z.norm() == 0.0 {
        return Ok(true);
    }
    Ok(zplane_coords(z, 1.0)?.zeta >= zeta_min)
}

/// Boundary radius of the cardioid at polar angle `theta ∈ [−π, π]`.
pub fn cardioid_radius(zeta_min: f64, theta: f64) -> f64 {
    let beta = zeta_min.acos();
    (-theta.abs() / beta.tan()).exp()
}
