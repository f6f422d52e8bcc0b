//! End-to-end run of the procedure for one seed, with every intermediate
//! artifact written to disk.

use std::f64::consts::PI;
use std::fs::{self, File};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::plot::{Figure, Series, SeriesKind, PALETTE};
use super::stages::region_figure;
use super::study::{
    case_regions, constrain_run, derive_seed, identify_run, simulation_fit, step_test, CaseRegion, RunOutcome, SeedStream,
};
use crate::constrain::{SdpProblem, SolverStatus, VerificationReport};
use crate::error::{Result, SidError, StageContext};
use crate::features::{extract_features, priors_from_features, DampingRule, PriorEstimates, StepFeatures};
use crate::lti::{frequency_response, log_grid, DiscreteStateSpace, ModelFile, SignalRecord};

/// Points on the Bode grid.
pub const BODE_POINTS: usize = 200;
/// Lowest Bode frequency, rad/s; the grid ends at `π/ts`.
pub const BODE_LOW: f64 = 1e-2;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelCheck {
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
    /// Simulation fit (%) against the noise-free identification output.
    pub fit: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseCheck {
    pub case: String,
    pub status: SolverStatus,
    pub objective: f64,
    pub iterations: usize,
    pub cond_p: f64,
    pub verification: VerificationReport,
    pub model: ModelCheck,
}

/// Validation of the unconstrained and constrained models of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub true_eigenvalues: Vec<Complex64>,
    pub order: usize,
    pub unconstrained: ModelCheck,
    pub cases: Vec<CaseCheck>,
    pub passed: bool,
}

/// Features and priors read off the step test with the experiment's default
/// feature settings, whether or not a case uses them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepSummary {
    pub features: Option<StepFeatures>,
    pub priors: Option<PriorEstimates>,
    pub error: Option<String>,
}

impl StepSummary {
    pub fn from_record(cfg: &ExperimentConfig, step: &SignalRecord) -> Self {
        let features = match extract_features(step, &cfg.features) {
            Ok(f) => f,
            Err(e) => return Self { features: None, priors: None, error: Some(e.to_string()) },
        };
        match priors_from_features(&features, DampingRule::Linear) {
            Ok(p) => Self { features: Some(features), priors: Some(p), error: None },
            Err(e) => Self { features: Some(features), priors: None, error: Some(e.to_string()) },
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub plant: DiscreteStateSpace,
    pub step_noisy: SignalRecord,
    pub step_clean: SignalRecord,
    pub step_summary: StepSummary,
    pub regions: Vec<CaseRegion>,
    pub run: RunOutcome,
    pub validation: ValidationReport,
}

fn check(model: &DiscreteStateSpace, record: &SignalRecord, clean: &[f64]) -> Result<ModelCheck> {
    Ok(ModelCheck {
        eigenvalues: model.poles(),
        spectral_radius: model.spectral_radius(),
        fit: simulation_fit(model, record, clean)?,
    })
}

/// Runs the whole procedure once: simulate, identify, step test, regions,
/// constrained solve and validation. `seed` overrides the configured master seed.
///
/// Any failure halts the run with an error tagged by the stage that raised it.
pub fn run_pipeline(cfg: &ExperimentConfig, seed: Option<u64>) -> Result<PipelineResult> {
    cfg.validate().stage("config")?;
    let master = seed.unwrap_or(cfg.montecarlo.seed);
    let plant = cfg.plant_model().stage("plant")?;
    let (step_noisy, step_clean) = step_test(cfg, &plant, derive_seed(master, SeedStream::StepTest, 0)).stage("step-test")?;
    let step_summary = StepSummary::from_record(cfg, &step_noisy);
    let regions = case_regions(cfg, &step_noisy)?;
    if regions.is_empty() {
        return Err(SidError::Config("no constraint cases configured".into())).stage("region");
    }
    let run_seed = derive_seed(master, SeedStream::Run, 0);
    let data = identify_run(cfg, &plant, run_seed)?;
    let run = constrain_run(cfg, &regions, 0, run_seed, data);
    for c in &run.cases {
        match (c.status, &c.error) {
            (Some(SolverStatus::Infeasible), _) => {
                return Err(SidError::Infeasible(format!("case {}: region admits no real point", c.case)))
                    .stage("constrain")
            }
            (_, Some(e)) => return Err(SidError::Numerical(format!("case {}: {e}", c.case))).stage("constrain"),
            _ => {}
        }
    }
    let record = run.record.as_ref().expect("successful run keeps its record");
    let unconstrained = run.model.as_ref().expect("successful run keeps its model");
    let mut cases = Vec::new();
    for c in &run.cases {
        let sol = c.solution.as_ref().expect("solved case keeps its solution");
        let model = c.model.as_ref().expect("solved case keeps its model");
        let verification = c.verification.clone().expect("solved case is verified");
        if !verification.passed() {
            return Err(SidError::Numerical(format!(
                "case {}: constrained model fails verification ({verification:?})",
                c.case
            )))
            .stage("validate");
        }
        cases.push(CaseCheck {
            case: c.case.clone(),
            status: sol.status,
            objective: sol.objective,
            iterations: sol.iterations,
            cond_p: sol.cond_p,
            verification,
            model: check(model, record, &run.clean_output).stage("validate")?,
        });
    }
    let validation = ValidationReport {
        seed: run.seed,
        true_eigenvalues: plant.poles(),
        order: run.order.unwrap_or(0),
        unconstrained: check(unconstrained, record, &run.clean_output).stage("validate")?,
        passed: cases.iter().all(|c| c.verification.passed()),
        cases,
    };
    Ok(PipelineResult { config: cfg.clone(), master_seed: master, plant, step_noisy, step_clean, step_summary, regions, run, validation })
}

/// Z-plane scatter of true, unconstrained and constrained eigenvalues over the region outlines.
pub fn eigen_figure(
    title: &str,
    plant: &DiscreteStateSpace,
    regions: &[CaseRegion],
    unconstrained: &[Complex64],
    constrained: &[(String, Vec<Complex64>)],
) -> Figure {
    let mut fig = region_figure(title, regions);
    fig.push(Series::from_complex("unconstrained", PALETTE[0], SeriesKind::Markers, unconstrained));
    for (i, (name, z)) in constrained.iter().enumerate() {
        fig.push(Series::from_complex(format!("constrained {name}"), PALETTE[(i + 1) % PALETTE.len()], SeriesKind::Markers, z));
    }
    fig.push(Series::from_complex("true", "#000000", SeriesKind::Markers, &plant.poles()));
    fig
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Magnitude (dB) and phase (deg) of each model on the shared Bode grid.
pub fn write_bode(path: &Path, ts: f64, models: &[(String, &DiscreteStateSpace)]) -> Result<()> {
    let grid = log_grid(BODE_LOW, PI / ts, BODE_POINTS);
    let mut out = csv::Writer::from_writer(File::create(path)?);
    let mut header = vec!["w".to_string()];
    for (name, _) in models {
        header.push(format!("{name}_mag_db"));
        header.push(format!("{name}_phase_deg"));
    }
    out.write_record(&header)?;
    let responses: Vec<Vec<Complex64>> = models
        .iter()
        .map(|(_, m)| match frequency_response(m, &grid) {
            Ok(h) => h.iter().map(|h| h[(0, 0)]).collect(),
            Err(_) => vec![Complex64::new(f64::NAN, f64::NAN); grid.len()],
        })
        .collect();
    for (k, w) in grid.iter().enumerate() {
        let mut row = vec![w.to_string()];
        for h in &responses {
            row.push((20.0 * h[k].norm().log10()).to_string());
            row.push(h[k].arg().to_degrees().to_string());
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

fn model_file(path: &Path, m: &DiscreteStateSpace) -> Result<()> {
    write_json(path, &ModelFile::from_discrete(m))
}

/// Writes every artifact of a pipeline run under `dir`.
pub fn write_pipeline(res: &PipelineResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir.join("cases"))?;
    write_json(&dir.join("config.json"), &res.config)?;
    let record = res.run.record.as_ref().expect("pipeline result keeps its record");
    record.write_csv(File::create(dir.join("identification.csv"))?)?;
    res.step_noisy.write_csv(File::create(dir.join("step_test.csv"))?)?;
    res.step_clean.write_csv(File::create(dir.join("step_clean.csv"))?)?;
    write_json(&dir.join("features.json"), &res.step_summary)?;
    write_json(&dir.join("priors.json"), &res.regions)?;
    model_file(&dir.join("model_true.json"), &res.plant)?;
    let unconstrained = res.run.model.as_ref().expect("pipeline result keeps its model");
    model_file(&dir.join("model_unconstrained.json"), unconstrained)?;

    let mut bode_models = vec![("true".to_string(), &res.plant), ("unconstrained".to_string(), unconstrained)];
    let mut constrained = Vec::new();
    for (c, r) in res.run.cases.iter().zip(&res.regions) {
        let sol = c.solution.as_ref().expect("pipeline cases are solved");
        let model = c.model.as_ref().expect("pipeline cases are solved");
        let case_dir = dir.join("cases").join(&c.case);
        fs::create_dir_all(&case_dir)?;
        write_json(&case_dir.join("region.json"), &r.region().to_file())?;
        let mut problem = SdpProblem::new(unconstrained.a.clone(), r.region().clone());
        problem.options = res.config.solver;
        write_json(&case_dir.join("problem.json"), &problem.to_file())?;
        write_json(&case_dir.join("solution.json"), sol)?;
        sol.write_trace(File::create(case_dir.join("trace.csv"))?)?;
        model_file(&case_dir.join("model.json"), model)?;
        bode_models.push((c.case.clone(), model));
        constrained.push((c.case.clone(), c.eigenvalues.clone()));
    }
    write_json(&dir.join("validation.json"), &res.validation)?;
    write_bode(&dir.join("bode.csv"), res.config.ts, &bode_models)?;
    let fig = eigen_figure(&res.config.name, &res.plant, &res.regions, &res.run.eigenvalues, &constrained);
    fig.save(dir, "eigenvalues")?;
    Ok(())
}
