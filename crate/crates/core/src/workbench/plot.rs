//! Minimal figure model written as CSV plus a hand-rolled SVG.
//!
//! Coordinates are placed in the SVG in data units under a single affine
//! transform, so every number in the SVG also appears verbatim in the CSV.

use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Line,
    Markers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub kind: SeriesKind,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn line(name: impl Into<String>, color: &'static str, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.into(), kind: SeriesKind::Line, color, points }
    }

    pub fn markers(name: impl Into<String>, color: &'static str, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.into(), kind: SeriesKind::Markers, color, points }
    }

    pub fn from_complex(name: impl Into<String>, color: &'static str, kind: SeriesKind, z: &[Complex64]) -> Self {
        Self { name: name.into(), kind, color, points: z.iter().map(|z| (z.re, z.im)).collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Same scale on both axes (z-plane plots).
    pub equal_aspect: bool,
    pub series: Vec<Series>,
}

pub const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#17becf", "#e377c2", "#7f7f7f"];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 50.0;

/// Shortest round-trip decimal form, shared by the CSV and the SVG.
pub fn num(v: f64) -> String {
    format!("{v}")
}

impl Figure {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            equal_aspect: false,
            series: Vec::new(),
        }
    }

    pub fn z_plane(title: impl Into<String>) -> Self {
        Self { equal_aspect: true, ..Self::new(title, "Re z", "Im z") }
    }

    pub fn push(&mut self, s: Series) -> &mut Self {
        self.series.push(s);
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let finite = self.series.iter().flat_map(|s| &s.points).filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in finite {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return (-1.0, 1.0, -1.0, 1.0);
        }
        let pad = |lo: f64, hi: f64| {
            let w = (hi - lo).max(1e-9);
            (lo - 0.05 * w, hi + 0.05 * w)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        (x0, x1, y0, y1)
    }

    /// Long-format CSV: `series,kind,x,y`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["series", "kind", "x", "y"])?;
        for s in &self.series {
            let kind = match s.kind {
                SeriesKind::Line => "line",
                SeriesKind::Markers => "markers",
            };
            for &(x, y) in &s.points {
                out.write_record([s.name.as_str(), kind, &num(x), &num(y)])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_svg(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
        let (mut sx, mut sy) = (pw / (x1 - x0), ph / (y1 - y0));
        if self.equal_aspect {
            let s = sx.min(sy);
            sx = s;
            sy = s;
        }
        // data (x, y) -> page (tx + sx·x, ty − sy·y), centred in the plot area
        let tx = MARGIN + 0.5 * (pw - sx * (x1 - x0)) - sx * x0;
        let ty = MARGIN + ph - 0.5 * (ph - sy * (y1 - y0)) + sy * y0;
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="14" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        let _ = writeln!(
            svg,
            r##"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="#999"/>"##
        );
        let _ = writeln!(svg, r#"<g transform="matrix({sx} 0 0 {} {tx} {ty})" fill="none">"#, -sy);
        for s in &self.series {
            let _ = writeln!(svg, r#"<g data-series="{}" stroke="{}">"#, escape(&s.name), s.color);
            match s.kind {
                SeriesKind::Line => {
                    // NaN breaks a polyline into pieces
                    for piece in s.points.split(|(x, y)| !(x.is_finite() && y.is_finite())) {
                        if piece.is_empty() {
                            continue;
                        }
                        let pts: Vec<String> = piece.iter().map(|&(x, y)| format!("{},{}", num(x), num(y))).collect();
                        let _ = writeln!(
                            svg,
                            r#"<polyline points="{}" stroke-width="1.5" vector-effect="non-scaling-stroke"/>"#,
                            pts.join(" ")
                        );
                    }
                }
                SeriesKind::Markers => {
                    for &(x, y) in s.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
                        let _ = writeln!(
                            svg,
                            r#"<path d="M {} {} h 0" stroke-width="6" stroke-linecap="round" vector-effect="non-scaling-stroke"/>"#,
                            num(x),
                            num(y)
                        );
                    }
                }
            }
            let _ = writeln!(svg, "</g>");
        }
        let _ = writeln!(svg, "</g>");
        for (i, s) in self.series.iter().enumerate() {
            let y = MARGIN + 14.0 + 14.0 * i as f64;
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="11" fill="{}">{}</text>"#,
                MARGIN + 6.0,
                s.color,
                escape(&s.name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }

    /// Writes `<stem>.csv` and `<stem>.svg` under `dir`.
    pub fn save(&self, dir: &std::path::Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_csv(std::fs::File::create(dir.join(format!("{stem}.csv")))?)?;
        std::fs::write(dir.join(format!("{stem}.svg")), self.to_svg())?;
        Ok(())
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
