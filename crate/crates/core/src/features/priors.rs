use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::extract::{Extremum, StepFeatures};
use crate::error::{Result, SidError};
use crate::region::{
    cardioid_circle, cardioid_ellipse_conservative, cardioid_ellipse_inner, conic_region,
    intersect, settling_circle, stability_circle, LmiRegion,
};

/// How `ζ̂` is read off the overshoot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DampingRule {
    /// `ζ ≈ 0.6·(1 − O_s/100)`.
    #[default]
    Linear,
    /// Exact second-order relation `O_s = 100·e^{−ζπ/√(1−ζ²)}`.
    LogDecrement,
}

/// Which extrema produced each estimate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub overshoot: Option<Extremum>,
    pub period: Option<(Extremum, Extremum)>,
    pub settling_time: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PriorEstimates {
    pub zeta_hat: Option<f64>,
    pub wd_hat: Option<f64>,
    pub zeta_wn_hat: Option<f64>,
    #[serde(default)]
    pub provenance: Provenance,
}

/// Non-negative widening applied to each prior.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Deltas {
    pub zeta: f64,
    pub wd: f64,
    pub zeta_wn: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedPriors {
    pub zeta_min: Option<f64>,
    pub wd_max: Option<f64>,
    pub zeta_wn_min: Option<f64>,
    pub deltas: Deltas,
}

/// Spread measure used as the tuning deltas when aggregating several tests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpreadRule {
    /// Sample standard deviation.
    #[default]
    StdDev,
    /// `max − min`, i.e. `|difference|` for a pair of tests.
    Range,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OvershootShape {
    Circle,
    InnerEllipse,
    ConservativeEllipse,
}

/// Constructors combined by `regions_from_priors`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegionFlags {
    pub overshoot: Option<OvershootShape>,
    pub conic: bool,
    pub settling: bool,
    pub stability: bool,
}

impl RegionFlags {
    pub fn is_empty(&self) -> bool {
        self.overshoot.is_none() && !self.conic && !self.settling && !self.stability
    }
}

pub fn priors_from_features(f: &StepFeatures, rule: DampingRule) -> Result<PriorEstimates> {
    let zeta_hat = match f.overshoot_marker {
        Some(_) if f.os >= 100.0 => {
            return Err(SidError::Domain(format!(
                "overshoot {:.2}% implies a non-positive damping ratio",
                f.os
            )))
        }
        Some(_) if f.os > 0.0 => Some(match rule {
            DampingRule::Linear => 0.6 * (1.0 - f.os / 100.0),
            DampingRule::LogDecrement => {
                let l = (f.os / 100.0).ln();
                -l / (PI * PI + l * l).sqrt()
            }
        }),
        _ => None,
    };
    let wd_hat = f.td.map(|td| 2.0 * PI / td);
    let zeta_wn_hat = (f.ts1 > 0.0).then(|| 4.6 / f.ts1);
    if zeta_hat.is_none() && wd_hat.is_none() && zeta_wn_hat.is_none() {
        return Err(SidError::MissingFeature("no overshoot, period or settling time".into()));
    }
    Ok(PriorEstimates {
        zeta_hat,
        wd_hat,
        zeta_wn_hat,
        provenance: Provenance {
            overshoot: f.overshoot_marker,
            period: f.period_markers,
            settling_time: zeta_wn_hat.map(|_| f.ts1),
        },
    })
}

/// Per-field mean over the tests that produced the field, with the spread
/// (standard deviation or range) returned as tuning deltas.
pub fn aggregate_priors(estimates: &[PriorEstimates], rule: SpreadRule) -> Result<(PriorEstimates, Deltas)> {
    if estimates.is_empty() {
        return Err(SidError::InsufficientData("no prior estimates to aggregate".into()));
    }
    let field = |get: fn(&PriorEstimates) -> Option<f64>| -> (Option<f64>, f64) {
        let v: Vec<f64> = estimates.iter().filter_map(get).collect();
        if v.is_empty() {
            return (None, 0.0);
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let spread = match rule {
            SpreadRule::StdDev if v.len() > 1 => {
                (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            }
            SpreadRule::StdDev => 0.0,
            SpreadRule::Range => {
                v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - v.iter().cloned().fold(f64::INFINITY, f64::min)
            }
        };
        (Some(mean), spread)
    };
    let (zeta_hat, dz) = field(|e| e.zeta_hat);
    let (wd_hat, dw) = field(|e| e.wd_hat);
    let (zeta_wn_hat, ds) = field(|e| e.zeta_wn_hat);
    let provenance = if estimates.len() == 1 { estimates[0].provenance.clone() } else { Provenance::default() };
    Ok((
        PriorEstimates { zeta_hat, wd_hat, zeta_wn_hat, provenance },
        Deltas { zeta: dz, wd: dw, zeta_wn: ds },
    ))
}

/// `ζ_min = ζ̂ − Δζ`, `w_d,max = ŵ_d + Δw_d`, `ζw_n,min = ζ̂w_n − Δζw_n`,
/// checked against `0 < ζ_min < 1`, `w_d,max < w_s/4` and `ζw_n,min > 0`.
pub fn apply_tuning(priors: &PriorEstimates, deltas: &Deltas, ts: f64) -> Result<BoundedPriors> {
    if deltas.zeta < 0.0 || deltas.wd < 0.0 || deltas.zeta_wn < 0.0 {
        return Err(SidError::Domain("tuning deltas must be non-negative".into()));
    }
    if !(ts > 0.0) {
        return Err(SidError::SamplingPeriod(ts));
    }
    let zeta_min = priors.zeta_hat.map(|z| z - deltas.zeta);
    if let Some(z) = zeta_min {
        if !(z > 0.0 && z < 1.0) {
            return Err(SidError::Domain(format!("ζ_min = {z:.4} outside (0, 1)")));
        }
    }
    let wd_max = priors.wd_hat.map(|w| w + deltas.wd);
    if let Some(w) = wd_max {
        let quarter = PI / (2.0 * ts);
        if !(w > 0.0) {
            return Err(SidError::Domain(format!("w_d,max = {w:.4} must be positive")));
        }
        if w >= quarter {
            return Err(SidError::SamplingRate(format!(
                "w_d,max = {w:.4} rad/s reaches w_s/4 = {quarter:.4} rad/s; need Ts ≤ Td_max/4"
            )));
        }
    }
    let zeta_wn_min = priors.zeta_wn_hat.map(|s| s - deltas.zeta_wn);
    if let Some(s) = zeta_wn_min {
        if !(s > 0.0) {
            return Err(SidError::Domain(format!("ζw_n,min = {s:.4} must be positive")));
        }
    }
    Ok(BoundedPriors { zeta_min, wd_max, zeta_wn_min, deltas: *deltas })
}

/// Intersection of the regions selected by `flags`.
pub fn regions_from_priors(b: &BoundedPriors, ts: f64, flags: &RegionFlags) -> Result<LmiRegion> {
    if flags.is_empty() {
        return Err(SidError::Domain("no region selected".into()));
    }
    let need = |v: Option<f64>, what: &str| {
        v.ok_or_else(|| SidError::MissingFeature(format!("{what} prior unavailable")))
    };
    let mut parts = Vec::new();
    if let Some(shape) = flags.overshoot {
        let z = need(b.zeta_min, "damping")?;
        parts.push(match shape {
            OvershootShape::Circle => cardioid_circle(z)?.0,
            OvershootShape::InnerEllipse => cardioid_ellipse_inner(z)?.0,
            OvershootShape::ConservativeEllipse => cardioid_ellipse_conservative(z)?.0,
        });
    }
    if flags.conic {
        parts.push(conic_region(need(b.wd_max, "damped frequency")? * ts)?);
    }
    if flags.settling {
        parts.push(settling_circle(need(b.zeta_wn_min, "settling")?, ts)?.0);
    }
    if flags.stability {
        parts.push(stability_circle());
    }
    intersect(&parts)
}
