//! LMI regions of the z-plane: representation, the constructors that encode
//! damping, oscillation and settling priors, intersection, and the exact
//! non-convex images used to validate them.

pub mod boundary;
mod constructors;
mod exact;
mod lmi;

pub use constructors::{
    cardioid_circle, cardioid_ellipse_conservative, cardioid_ellipse_inner, circle, conic_region,
    critical_zeta, ellipse, settling_circle, stability_circle, CardioidGeometry, CircleParams,
    CriticalDamping, EllipseParams,
};
pub use exact::{cardioid_radius, exact_cardioid_contains, zplane_coords, ZPlaneCoords};
pub use lmi::{intersect, LmiRegion, RegionFile, DEFAULT_MEMBERSHIP_TOL};

#[cfg(test)]
mod tests;
