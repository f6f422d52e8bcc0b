//! Orchestration of the constrained identification procedure: experiment
//! configs, the single-seed pipeline, Monte Carlo studies and figure data.

mod config;
mod gallery;
mod montecarlo;
mod pipeline;
pub mod plot;
mod stages;
mod study;

pub use config::{
    CaseSpec, ExcitationSpec, ExperimentConfig, MonteCarloSpec, NoiseSpec, PlantSpec, PriorSource, PriorValues,
    StepTestSpec, CONFIG_VERSION,
};
pub use gallery::{region_gallery, write_gallery, Gallery, GallerySpec, OvershootPanel};
pub use montecarlo::{
    run_montecarlo, write_montecarlo, CaseSummary, MonteCarloOverrides, MonteCarloReport, StepBand,
    UnconstrainedSummary,
};
pub use pipeline::{
    eigen_figure, run_pipeline, write_bode, write_pipeline, CaseCheck, ModelCheck, PipelineResult, StepSummary,
    ValidationReport,
    BODE_LOW, BODE_POINTS,
};
pub use stages::{
    features_figure, record_figure, region_figure, write_priors_csv, OUTLINE_POINTS, OUTLINE_REACH,
};
pub use study::{
    case_region, case_regions, constrain_case, constrain_run, derive_seed, excitation, identification_record,
    identify_run, normalized_step, run_once, simulation_fit, step_test, CaseRegion, CaseRun, RunOutcome, SeedStream,
    MEMBERSHIP_TOL,
};
