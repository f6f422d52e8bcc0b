//! Step-response features (overshoot, damped period, 1% settling time), the
//! prior parameters they imply, conservative tuning, and region assembly.

mod extract;
mod priors;

pub use extract::{
    extract_features, ExtremaSelector, Extremum, ExtremumKind, FeatureConfig, StepFeatures,
};
pub use priors::{
    aggregate_priors, apply_tuning, priors_from_features, regions_from_priors, BoundedPriors,
    DampingRule, Deltas, OvershootShape, PriorEstimates, Provenance, RegionFlags, SpreadRule,
};
