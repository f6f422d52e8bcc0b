use serde::{Deserialize, Serialize};

use crate::error::{Result, SidError};
use crate::lti::SignalRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Peak,
    Valley,
}

/// A local extremum of the step response. `index` is the nearest sample;
/// `time` and `value` may be interpolated between samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub index: usize,
    pub time: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// Which extrema define the damped period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ExtremaSelector {
    /// `pair`-th peak (0-based) and the valley right after it; `T_d = 2·(t_v − t_p)`.
    HalfPeriod { pair: usize },
    /// `pair`-th valley and the peak right after it; `T_d = 2·(t_p − t_v)`.
    HalfPeriodFromValley { pair: usize },
    /// Consecutive peaks `pair` and `pair + 1`; `T_d = t₂ − t₁`.
    FullPeriod { pair: usize },
    /// Hand-picked sample indices. `overshoot` marks the peak used for `O_s`;
    /// `period` is a pair of samples one half (or one full) period apart.
    Explicit {
        overshoot: Option<usize>,
        period: Option<(usize, usize)>,
        #[serde(default = "default_true")]
        half: bool,
    },
}

fn default_true() -> bool {
    true
}

impl Default for ExtremaSelector {
    fn default() -> Self {
        ExtremaSelector::HalfPeriod { pair: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// Moving-average window in samples; `None` uses `max(3, N/100)`.
    pub smoothing_window: Option<usize>,
    /// Minimum swing between consecutive extrema, as a fraction of the step size.
    pub prominence: f64,
    /// Settling band as a fraction of the step size.
    pub settle_band: f64,
    /// Trailing fraction of the record averaged for the steady-state value.
    pub final_fraction: f64,
    /// Output level before the step is applied.
    pub baseline: f64,
    pub selector: ExtremaSelector,
    /// Output channel to analyse.
    pub channel: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            smoothing_window: None,
            prominence: 0.02,
            settle_band: 0.01,
            final_fraction: 0.1,
            baseline: 0.0,
            selector: ExtremaSelector::default(),
            channel: 0,
        }
    }
}

/// Transient measures of one step response.
///
/// `os` is zero when no peak rises above the steady state. `td` and `tp`
/// are unavailable without a usable pair of extrema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFeatures {
    pub os: f64,
    pub td: Option<f64>,
    pub ts1: f64,
    pub tr: Option<f64>,
    pub tp: Option<f64>,
    pub y0: f64,
    pub y_final: f64,
    pub extrema: Vec<Extremum>,
    /// Peak behind `os`.
    pub overshoot_marker: Option<Extremum>,
    /// Extrema behind `td`.
    pub period_markers: Option<(Extremum, Extremum)>,
}

impl StepFeatures {
    /// Time constant `τ = 1/ζw_n` implied by the settling time.
    pub fn tau(&self) -> Option<f64> {
        (self.ts1 > 0.0).then(|| self.ts1 / 4.6)
    }
}

pub fn extract_features(signal: &SignalRecord, cfg: &FeatureConfig) -> Result<StepFeatures> {
    if cfg.channel >= signal.outputs.len() {
        return Err(SidError::Dimension(format!(
            "output channel {} not present ({} outputs)",
            cfg.channel,
            signal.outputs.len()
        )));
    }
    let y = signal.output(cfg.channel);
    let n = y.len();
    if n < 3 {
        return Err(SidError::InsufficientData(format!("step response has {n} samples")));
    }
    if !(cfg.prominence >= 0.0 && cfg.settle_band > 0.0) {
        return Err(SidError::Config("prominence must be ≥ 0 and settle band > 0".into()));
    }
    if !(cfg.final_fraction > 0.0 && cfg.final_fraction <= 1.0) {
        return Err(SidError::Config("final fraction must lie in (0, 1]".into()));
    }

    let tail = ((n as f64 * cfg.final_fraction).round() as usize).clamp(1, n);
    let y_final = y[n - tail..].iter().sum::<f64>() / tail as f64;
    let y0 = cfg.baseline;
    let step = y_final - y0;
    if step.abs() < f64::EPSILON * y_final.abs().max(1.0) {
        return Err(SidError::Domain("step response has no net change".into()));
    }

    // normalized so the step runs 0 → 1 regardless of sign or gain
    let g: Vec<f64> = y.iter().map(|v| (v - y0) / step).collect();
    let ts = signal.ts;
    let time = |i: usize| signal.time[i];

    let ts1 = settling_time(&g, cfg.settle_band, &signal.time);

    let window = cfg.smoothing_window.unwrap_or((n / 100).max(3)).max(1);
    let smooth = moving_average(&g, window);
    let reach = window / 2 + 1;
    let extrema: Vec<Extremum> = zigzag(&smooth, cfg.prominence)
        .into_iter()
        .map(|(i, kind)| {
            let (t, v, idx) = refine(&g, i, kind, reach, ts, time(0));
            Extremum { index: idx, time: t, value: y0 + v * step, kind }
        })
        .collect();
    // keep extrema from the first overshoot on; earlier swings belong to the rise
    let first = extrema
        .iter()
        .position(|e| e.kind == ExtremumKind::Peak && norm(e.value, y0, step) > 1.0);
    let extrema: Vec<Extremum> = match first {
        Some(k) => dedupe_times(extrema[k..].to_vec()),
        None => Vec::new(),
    };

    let peaks: Vec<&Extremum> = extrema.iter().filter(|e| e.kind == ExtremumKind::Peak).collect();
    let (overshoot_marker, period_markers) = match &cfg.selector {
        ExtremaSelector::Explicit { overshoot, period, .. } => {
            let at = |i: usize, kind| -> Result<Extremum> {
                if i >= n {
                    return Err(SidError::Config(format!("marker index {i} beyond {n} samples")));
                }
                Ok(Extremum { index: i, time: time(i), value: y[i], kind })
            };
            let os = overshoot.map(|i| at(i, ExtremumKind::Peak)).transpose()?;
            let pm = match period {
                Some((a, b)) => {
                    let kind_of = |i: usize| {
                        if g[i] >= 1.0 {
                            ExtremumKind::Peak
                        } else {
                            ExtremumKind::Valley
                        }
                    };
                    Some((at(*a, kind_of(*a))?, at(*b, kind_of(*b))?))
                }
                None => None,
            };
            (os, pm)
        }
        sel => {
            let os = peaks.first().map(|e| **e);
            (os, select_period(&extrema, sel))
        }
    };

    let os = overshoot_marker
        .map(|p| (100.0 * (norm(p.value, y0, step) - 1.0)).max(0.0))
        .unwrap_or(0.0);
    let td = period_markers.and_then(|(a, b)| {
        let half = match &cfg.selector {
            ExtremaSelector::FullPeriod { .. } => false,
            ExtremaSelector::Explicit { half, .. } => *half,
            _ => true,
        };
        let dt = (b.time - a.time).abs();
        let td = if half { 2.0 * dt } else { dt };
        (td > 0.0).then_some(td)
    });

    Ok(StepFeatures {
        os,
        td,
        ts1,
        tr: rise_time(&smooth, &signal.time),
        tp: overshoot_marker.map(|p| p.time - time(0)),
        y0,
        y_final,
        extrema,
        overshoot_marker,
        period_markers,
    })
}

fn norm(v: f64, y0: f64, step: f64) -> f64 {
    (v - y0) / step
}

fn select_period(extrema: &[Extremum], sel: &ExtremaSelector) -> Option<(Extremum, Extremum)> {
    let nth = |kind: ExtremumKind, k: usize| {
        extrema.iter().enumerate().filter(move |(_, e)| e.kind == kind).nth(k)
    };
    let following = |pos: usize, kind: ExtremumKind| extrema[pos + 1..].iter().find(|e| e.kind == kind);
    match sel {
        ExtremaSelector::HalfPeriod { pair } => {
            let (pos, p) = nth(ExtremumKind::Peak, *pair)?;
            following(pos, ExtremumKind::Valley).map(|v| (*p, *v))
        }
        ExtremaSelector::HalfPeriodFromValley { pair } => {
            let (pos, v) = nth(ExtremumKind::Valley, *pair)?;
            following(pos, ExtremumKind::Peak).map(|p| (*v, *p))
        }
        ExtremaSelector::FullPeriod { pair } => {
            let (pos, p) = nth(ExtremumKind::Peak, *pair)?;
            following(pos, ExtremumKind::Peak).map(|q| (*p, *q))
        }
        ExtremaSelector::Explicit { .. } => None,
    }
}

/// Centered moving average; the window shrinks near the ends.
fn moving_average(x: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 {
        return x.to_vec();
    }
    let n = x.len();
    let before = (window - 1) / 2;
    let after = window - 1 - before;
    let mut prefix = vec![0.0; n + 1];
    for (i, v) in x.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(before);
            let hi = (i + after + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Alternating extrema whose swing from the previous one reaches `delta`.
/// The scan starts climbing, as for a positive step.
fn zigzag(x: &[f64], delta: f64) -> Vec<(usize, ExtremumKind)> {
    let mut out = Vec::new();
    let mut looking_for = ExtremumKind::Peak;
    let mut cand = 0usize;
    let mut anchor = x[0];
    for i in 1..x.len() {
        match looking_for {
            ExtremumKind::Peak => {
                if x[i] > x[cand] {
                    cand = i;
                } else if x[cand] - x[i] >= delta && x[cand] - anchor >= delta {
                    out.push((cand, ExtremumKind::Peak));
                    anchor = x[cand];
                    looking_for = ExtremumKind::Valley;
                    cand = i;
                }
            }
            ExtremumKind::Valley => {
                if x[i] < x[cand] {
                    cand = i;
                } else if x[i] - x[cand] >= delta {
                    out.push((cand, ExtremumKind::Valley));
                    anchor = x[cand];
                    looking_for = ExtremumKind::Peak;
                    cand = i;
                }
            }
        }
    }
    // a last turning point whose recovery is too shallow to confirm it
    let last = x.len() - 1;
    if cand != last && cand != 0 && (x[cand] - anchor).abs() >= delta && !out.is_empty() {
        out.push((cand, looking_for));
    }
    out
}

/// Snaps to the raw extremum near `i` and interpolates a parabola through it
/// and its neighbours. Returns (time, normalized value, sample index).
fn refine(g: &[f64], i: usize, kind: ExtremumKind, reach: usize, ts: f64, t0: f64) -> (f64, f64, usize) {
    let lo = i.saturating_sub(reach);
    let hi = (i + reach).min(g.len() - 1);
    let sign = if kind == ExtremumKind::Peak { 1.0 } else { -1.0 };
    let k = (lo..=hi)
        .max_by(|&a, &b| (sign * g[a]).total_cmp(&(sign * g[b])))
        .unwrap_or(i);
    if k == 0 || k + 1 >= g.len() {
        return (t0 + k as f64 * ts, g[k], k);
    }
    let (l, m, r) = (g[k - 1], g[k], g[k + 1]);
    let curv = l - 2.0 * m + r;
    let shift = if curv.abs() > 0.0 { (0.5 * (l - r) / curv).clamp(-0.5, 0.5) } else { 0.0 };
    (t0 + (k as f64 + shift) * ts, m - 0.25 * (l - r) * shift, k)
}

fn dedupe_times(mut ex: Vec<Extremum>) -> Vec<Extremum> {
    ex.dedup_by(|b, a| b.time <= a.time);
    ex
}

/// Time after the last excursion beyond the band; the first sample when
/// the response never leaves it.
fn settling_time(g: &[f64], band: f64, time: &[f64]) -> f64 {
    match g.iter().rposition(|v| (v - 1.0).abs() > band) {
        Some(k) if k + 1 < g.len() => time[k + 1],
        Some(k) => time[k],
        None => time[0],
    }
}

/// 10–90% rise time with linear interpolation between samples.
fn rise_time(g: &[f64], time: &[f64]) -> Option<f64> {
    let cross = |level: f64| -> Option<f64> {
        let k = g.iter().position(|v| *v >= level)?;
        if k == 0 {
            return Some(time[0]);
        }
        let frac = (level - g[k - 1]) / (g[k] - g[k - 1]);
        Some(time[k - 1] + frac * (time[k] - time[k - 1]))
    };
    let (a, b) = (cross(0.1)?, cross(0.9)?);
    (b > a).then_some(b - a)
}
