//! Boundary data and overlays for the region constructors.

use std::path::Path;

use serde::Serialize;

use crate::error::{Result, SidError};
use crate::region::boundary;
use crate::region::{
    cardioid_circle, cardioid_ellipse_conservative, cardioid_ellipse_inner, settling_circle, CircleParams,
    EllipseParams,
};

use super::plot::{Figure, Series, SeriesKind, PALETTE};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GallerySpec {
    pub zetas: Vec<f64>,
    pub ts: f64,
    /// Damped-frequency bounds, rad/s.
    pub wds: Vec<f64>,
    /// Settling bounds `ζw_n`, rad/s.
    pub zeta_wns: Vec<f64>,
}

/// Parameters of the overshoot shapes for one damping bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvershootPanel {
    pub zeta: f64,
    pub circle: CircleParams,
    pub inner: EllipseParams,
    pub conservative: EllipseParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gallery {
    pub overshoot: Vec<OvershootPanel>,
    pub figures: Vec<(String, Figure)>,
}

fn series(name: String, color: &'static str, z: &[num_complex::Complex64]) -> Series {
    Series::from_complex(name, color, SeriesKind::Line, z)
}

/// One overlay per family: overshoot shapes against the exact cardioid for
/// each `ζ`, conic sectors for each `w_d`, settling circles for each `ζw_n`.
pub fn region_gallery(spec: &GallerySpec) -> Result<Gallery> {
    if spec.zetas.is_empty() && spec.wds.is_empty() && spec.zeta_wns.is_empty() {
        return Err(SidError::Config("gallery needs at least one ζ, w_d or ζw_n value".into()));
    }
    if !(spec.ts > 0.0) && !(spec.wds.is_empty() && spec.zeta_wns.is_empty()) {
        return Err(SidError::SamplingPeriod(spec.ts));
    }
    let mut figures = Vec::new();
    let mut panels = Vec::new();
    for (i, &zeta) in spec.zetas.iter().enumerate() {
        let (_, circle) = cardioid_circle(zeta)?;
        let (_, inner) = cardioid_ellipse_inner(zeta)?;
        let (_, conservative) = cardioid_ellipse_conservative(zeta)?;
        let mut fig = Figure::z_plane(format!("overshoot regions, ζ_min = {zeta}"));
        fig.push(series("unit circle".into(), "#999999", &boundary::unit_circle()));
        fig.push(series("cardioid".into(), "#000000", &boundary::cardioid(zeta)));
        fig.push(series("circle".into(), PALETTE[0], &boundary::circle(&circle)));
        fig.push(series("inner ellipse".into(), PALETTE[2], &boundary::ellipse(&inner)));
        fig.push(series("conservative ellipse".into(), PALETTE[1], &boundary::ellipse(&conservative)));
        figures.push((format!("overshoot_{i}"), fig));
        panels.push(OvershootPanel { zeta, circle, inner, conservative });
    }
    if !spec.wds.is_empty() {
        let mut fig = Figure::z_plane(format!("conic sectors, Ts = {} s", spec.ts));
        fig.push(series("unit circle".into(), "#999999", &boundary::unit_circle()));
        for (i, &wd) in spec.wds.iter().enumerate() {
            // validates the sampling-rate condition
            crate::region::conic_region(wd * spec.ts)?;
            fig.push(series(format!("wd_max = {wd}"), PALETTE[i % PALETTE.len()], &boundary::conic(wd * spec.ts)));
        }
        figures.push(("conic".into(), fig));
    }
    if !spec.zeta_wns.is_empty() {
        let mut fig = Figure::z_plane(format!("settling circles, Ts = {} s", spec.ts));
        fig.push(series("unit circle".into(), "#999999", &boundary::unit_circle()));
        for (i, &s) in spec.zeta_wns.iter().enumerate() {
            let (_, p) = settling_circle(s, spec.ts)?;
            fig.push(series(format!("zeta_wn_min = {s}"), PALETTE[i % PALETTE.len()], &boundary::circle(&p)));
        }
        figures.push(("settling".into(), fig));
    }
    Ok(Gallery { overshoot: panels, figures })
}

/// Writes `gallery_<figure>.csv` and `.svg` for each overlay.
pub fn write_gallery(g: &Gallery, dir: &Path) -> Result<()> {
    for (stem, fig) in &g.figures {
        fig.save(dir, &format!("gallery_{stem}"))?;
    }
    Ok(())
}
