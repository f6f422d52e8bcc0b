//! Figures and tables for the individual stages of the procedure.

use std::io::Write;

use super::plot::{Figure, Series, SeriesKind, PALETTE};
use super::study::CaseRegion;
use crate::error::Result;
use crate::features::StepFeatures;
use crate::lti::SignalRecord;
use crate::region::boundary::{outline, unit_circle};

/// Plot reach for region outlines on the z-plane.
pub const OUTLINE_REACH: f64 = 2.5;
/// Rays per region outline.
pub const OUTLINE_POINTS: usize = 360;

/// Inputs and outputs of each record against time.
pub fn record_figure(title: &str, records: &[(&str, &SignalRecord)]) -> Figure {
    let mut fig = Figure::new(title, "t [s]", "signal");
    let mut color = PALETTE.iter().cycle();
    for (name, rec) in records {
        for ch in rec.inputs.iter().chain(&rec.outputs) {
            let pts = rec.time.iter().copied().zip(ch.samples.iter().copied()).collect();
            fig.push(Series::line(format!("{name} {}", ch.name), color.next().unwrap(), pts));
        }
    }
    fig
}

/// Step output with the extrema behind the extracted features.
pub fn features_figure(title: &str, step: &SignalRecord, channel: usize, features: &StepFeatures) -> Figure {
    let mut fig = Figure::new(title, "t [s]", "y");
    let pts = step.time.iter().copied().zip(step.output(channel).iter().copied()).collect();
    fig.push(Series::line("step", PALETTE[0], pts));
    let t_end = step.time.last().copied().unwrap_or(0.0);
    fig.push(Series::line("steady state", "#999999", vec![(0.0, features.y_final), (t_end, features.y_final)]));
    let extrema = features.extrema.iter().map(|e| (e.time, e.value)).collect();
    fig.push(Series::markers("extrema", PALETTE[1], extrema));
    let mut used: Vec<(f64, f64)> = features.overshoot_marker.iter().map(|e| (e.time, e.value)).collect();
    if let Some((a, b)) = &features.period_markers {
        used.push((a.time, a.value));
        used.push((b.time, b.value));
    }
    fig.push(Series::markers("markers", PALETTE[3], used));
    fig
}

/// Region outlines over the unit circle.
pub fn region_figure(title: &str, regions: &[CaseRegion]) -> Figure {
    let mut fig = Figure::z_plane(title);
    fig.push(Series::from_complex("unit circle", "#999999", SeriesKind::Line, &unit_circle()));
    for (i, r) in regions.iter().enumerate() {
        if let Some(pts) = outline(r.region(), OUTLINE_REACH, OUTLINE_POINTS) {
            fig.push(Series::from_complex(format!("region {}", r.name), PALETTE[(i + 1) % PALETTE.len()], SeriesKind::Line, &pts));
        }
    }
    fig
}

/// One row per step-test estimate of each case, followed by the case's
/// aggregated and bounded priors.
pub fn write_priors_csv<W: Write>(w: W, regions: &[CaseRegion]) -> Result<()> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["case", "row", "os", "td", "ts1", "zeta", "wd", "zeta_wn"])?;
    for r in regions {
        for (i, est) in r.estimates.iter().enumerate() {
            let f = r.features.get(i);
            out.write_record([
                r.name.clone(),
                i.to_string(),
                opt(f.map(|f| f.os)),
                opt(f.and_then(|f| f.td)),
                opt(f.map(|f| f.ts1)),
                opt(est.zeta_hat),
                opt(est.wd_hat),
                opt(est.zeta_wn_hat),
            ])?;
        }
        let a = &r.aggregate;
        out.write_record([r.name.clone(), "aggregate".into(), String::new(), String::new(), String::new(), opt(a.zeta_hat), opt(a.wd_hat), opt(a.zeta_wn_hat)])?;
        let b = &r.bounded;
        out.write_record([r.name.clone(), "bounded".into(), String::new(), String::new(), String::new(), opt(b.zeta_min), opt(b.wd_max), opt(b.zeta_wn_min)])?;
    }
    out.flush()?;
    Ok(())
}
