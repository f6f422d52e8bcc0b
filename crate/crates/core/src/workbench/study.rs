//! Stages shared by the pipeline and the Monte Carlo driver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{CaseSpec, ExperimentConfig, PriorSource};
use crate::constrain::{solve_constrained, verify_solution, SdpProblem, SdpSolution, SolverStatus, VerificationReport};
use crate::error::{Result, SidError, StageContext};
use crate::features::{
    aggregate_priors, apply_tuning, extract_features, priors_from_features, regions_from_priors,
    BoundedPriors, Deltas, FeatureConfig, PriorEstimates, StepFeatures,
};
use crate::linalg::{eigenvalues, spectral_radius};
use crate::lti::{
    colored_noise, prbs, samples_for_duration, simulate, simulate_outputs, step_response,
    white_noise, DiscreteStateSpace, SignalRecord,
};
use crate::region::LmiRegion;
use crate::subspace::{identify, IdentificationResult};

/// Eigenvalue membership tolerance used for validation.
pub const MEMBERSHIP_TOL: f64 = 1e-6;

/// Independent streams drawn from one master seed.
#[derive(Debug, Clone, Copy)]
pub enum SeedStream {
    Run = 1,
    StepTest = 2,
}

/// SplitMix64 finalizer over `(master, stream, index)`.
pub fn derive_seed(master: u64, stream: SeedStream, index: u64) -> u64 {
    let mut z = master
        .wrapping_add((stream as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Noise sequence of the experiment's noise spec, scaled by `sigma`.
fn noise_sequence(cfg: &ExperimentConfig, sigma: f64, len: usize, seed: u64) -> Result<Vec<f64>> {
    match &cfg.noise.filter {
        Some(filter) => colored_noise(filter, cfg.ts, sigma, len, seed),
        None => white_noise(sigma, len, seed),
    }
}

/// PRBS input of the identification experiment.
pub fn excitation(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let e = &cfg.excitation;
    let len = samples_for_duration(e.duration, cfg.ts);
    prbs(e.bits, e.hold, len, e.amplitude, e.seed)
}

/// Noisy identification record together with its noise-free output.
pub fn identification_record(
    cfg: &ExperimentConfig,
    plant: &DiscreteStateSpace,
    seed: u64,
) -> Result<(SignalRecord, Vec<f64>)> {
    let u = excitation(cfg)?;
    let len = u.len();
    let v = noise_sequence(cfg, cfg.noise.sigma, len, seed)?;
    let um = DMatrix::from_row_slice(1, len, &u);
    let noise = DMatrix::from_row_slice(1, len, &v);
    let clean = simulate_outputs(plant, &um, None)?;
    let record = simulate(plant, &um, &DVector::zeros(plant.order()), Some(&noise))?;
    Ok((record, clean.row(0).iter().copied().collect()))
}

fn mean_square(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>() / v.len().max(1) as f64
}

/// Unit-step test: `(noisy, noise-free)`.
///
/// The noise realization is rescaled so that the mean-square ratio of the
/// noise-free step response to the noise equals the configured SNR.
pub fn step_test(cfg: &ExperimentConfig, plant: &DiscreteStateSpace, seed: u64) -> Result<(SignalRecord, SignalRecord)> {
    let clean = step_response(plant, cfg.step_test.duration, None)?;
    let Some(snr_db) = cfg.step_test.snr_db else {
        return Ok((clean.clone(), clean));
    };
    let raw = noise_sequence(cfg, 1.0, clean.len(), seed)?;
    let p_noise = mean_square(&raw);
    if !(p_noise > 0.0) {
        return Ok((clean.clone(), clean));
    }
    let p_signal = mean_square(clean.output(0));
    let gain = (p_signal / p_noise / 10f64.powf(snr_db / 10.0)).sqrt();
    let scaled: Vec<f64> = raw.iter().map(|v| v * gain).collect();
    let noisy = step_response(plant, cfg.step_test.duration, Some(&scaled))?;
    Ok((noisy, clean))
}

/// Priors of one case and the region they define.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseRegion {
    pub name: String,
    pub features: Vec<StepFeatures>,
    pub estimates: Vec<PriorEstimates>,
    pub aggregate: PriorEstimates,
    pub deltas: Deltas,
    pub bounded: BoundedPriors,
    #[serde(skip)]
    pub region: Option<LmiRegion>,
}

impl CaseRegion {
    pub fn region(&self) -> &LmiRegion {
        self.region.as_ref().expect("region is built with the case")
    }
}

/// Features, priors, tuning and region for one case.
pub fn case_region(cfg: &ExperimentConfig, case: &CaseSpec, step: &SignalRecord) -> Result<CaseRegion> {
    let (features, estimates, spread, deltas_override) = match &case.priors {
        PriorSource::Values { estimates, spread, deltas } => {
            (Vec::new(), estimates.iter().map(|v| v.to_estimates()).collect::<Vec<_>>(), *spread, *deltas)
        }
        PriorSource::StepTest { selectors, damping_rule, spread, deltas } => {
            let mut features = Vec::new();
            let mut estimates = Vec::new();
            for sel in selectors {
                let fc = FeatureConfig { selector: sel.clone(), ..cfg.features.clone() };
                let f = extract_features(step, &fc).stage("features")?;
                estimates.push(priors_from_features(&f, *damping_rule).stage("features")?);
                features.push(f);
            }
            (features, estimates, *spread, *deltas)
        }
    };
    let (aggregate, spread_deltas) = aggregate_priors(&estimates, spread).stage("priors")?;
    let deltas = deltas_override.unwrap_or(spread_deltas);
    let bounded = apply_tuning(&aggregate, &deltas, cfg.ts).stage("priors")?;
    let mut region = regions_from_priors(&bounded, cfg.ts, &case.flags).stage("region")?;
    region.label = case.name.clone();
    Ok(CaseRegion { name: case.name.clone(), features, estimates, aggregate, deltas, bounded, region: Some(region) })
}

pub fn case_regions(cfg: &ExperimentConfig, step: &SignalRecord) -> Result<Vec<CaseRegion>> {
    cfg.cases.iter().map(|c| case_region(cfg, c, step)).collect()
}

/// Constrained result of one case in one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseRun {
    pub case: String,
    pub status: Option<SolverStatus>,
    pub objective: Option<f64>,
    pub iterations: usize,
    pub eigenvalues: Vec<Complex64>,
    pub inside: Vec<bool>,
    pub all_inside: bool,
    pub verified: bool,
    pub spectral_radius: Option<f64>,
    pub error: Option<String>,
    #[serde(skip)]
    pub model: Option<DiscreteStateSpace>,
    #[serde(skip)]
    pub solution: Option<SdpSolution>,
    #[serde(skip)]
    pub verification: Option<VerificationReport>,
}

impl CaseRun {
    fn failed(case: &str, e: &SidError) -> Self {
        Self {
            case: case.to_string(),
            status: None,
            objective: None,
            iterations: 0,
            eigenvalues: Vec::new(),
            inside: Vec::new(),
            all_inside: false,
            verified: false,
            spectral_radius: None,
            error: Some(e.to_string()),
            model: None,
            solution: None,
            verification: None,
        }
    }
}

/// Constrained solve for one case, then the independent checks.
pub fn constrain_case(
    unconstrained: &DiscreteStateSpace,
    region: &LmiRegion,
    case: &str,
    options: &crate::constrain::SolverOptions,
) -> CaseRun {
    let mut problem = SdpProblem::new(unconstrained.a.clone(), region.clone());
    problem.options = *options;
    let sol = match solve_constrained(&problem) {
        Ok(s) => s,
        Err(e) => return CaseRun::failed(case, &e),
    };
    if sol.status == SolverStatus::Infeasible {
        return CaseRun {
            status: Some(sol.status),
            error: Some(format!("region {case} admits no real point")),
            ..CaseRun::failed(case, &SidError::Infeasible(case.into()))
        };
    }
    let report = match verify_solution(&problem, &sol, MEMBERSHIP_TOL) {
        Ok(r) => r,
        Err(e) => return CaseRun::failed(case, &e),
    };
    let model = match unconstrained.with_a(sol.a_hat.clone()) {
        Ok(m) => m,
        Err(e) => return CaseRun::failed(case, &e),
    };
    CaseRun {
        case: case.to_string(),
        status: Some(sol.status),
        objective: Some(sol.objective),
        iterations: sol.iterations,
        all_inside: report.inside.iter().all(|b| *b),
        eigenvalues: report.eigenvalues.clone(),
        inside: report.inside.clone(),
        verified: report.passed(),
        spectral_radius: Some(spectral_radius(&sol.a_hat)),
        error: None,
        model: Some(model),
        solution: Some(sol),
        verification: Some(report),
    }
}

/// One identification experiment with all its constrained variants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOutcome {
    pub run: usize,
    pub seed: u64,
    pub order: Option<usize>,
    pub singular_values: Vec<f64>,
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: Option<f64>,
    pub cases: Vec<CaseRun>,
    pub error: Option<String>,
    #[serde(skip)]
    pub record: Option<SignalRecord>,
    #[serde(skip)]
    pub clean_output: Vec<f64>,
    #[serde(skip)]
    pub model: Option<DiscreteStateSpace>,
}

/// Simulates the identification experiment and runs PI-MOESP.
pub fn identify_run(
    cfg: &ExperimentConfig,
    plant: &DiscreteStateSpace,
    seed: u64,
) -> Result<(SignalRecord, Vec<f64>, IdentificationResult)> {
    let (record, clean) = identification_record(cfg, plant, seed).stage("simulate")?;
    let id = identify(&record, &cfg.identification).stage("identify")?;
    Ok((record, clean, id))
}

fn empty_outcome(run: usize, seed: u64) -> RunOutcome {
    RunOutcome {
        run,
        seed,
        order: None,
        singular_values: Vec::new(),
        eigenvalues: Vec::new(),
        spectral_radius: None,
        cases: Vec::new(),
        error: None,
        record: None,
        clean_output: Vec::new(),
        model: None,
    }
}

/// Constrained solve and checks for every region on an identified model.
pub fn constrain_run(
    cfg: &ExperimentConfig,
    regions: &[CaseRegion],
    run: usize,
    seed: u64,
    (record, clean, id): (SignalRecord, Vec<f64>, IdentificationResult),
) -> RunOutcome {
    let cases = regions
        .iter()
        .map(|r| constrain_case(&id.model, r.region(), &r.name, &cfg.solver))
        .collect();
    RunOutcome {
        order: Some(id.order),
        singular_values: id.singular_values,
        eigenvalues: eigenvalues(&id.model.a),
        spectral_radius: Some(spectral_radius(&id.model.a)),
        cases,
        record: Some(record),
        clean_output: clean,
        model: Some(id.model),
        ..empty_outcome(run, seed)
    }
}

/// Identification plus constrained solves with a fixed set of regions; failures are recorded in the
/// outcome instead of returned.
pub fn run_once(
    cfg: &ExperimentConfig,
    plant: &DiscreteStateSpace,
    regions: &[CaseRegion],
    run: usize,
    seed: u64,
) -> RunOutcome {
    match identify_run(cfg, plant, seed) {
        Ok(data) => constrain_run(cfg, regions, run, seed, data),
        Err(e) => RunOutcome { error: Some(e.to_string()), ..empty_outcome(run, seed) },
    }
}

/// Unit step of `model` divided by its static gain; `None` for unstable or
/// zero-gain models.
pub fn normalized_step(model: &DiscreteStateSpace, duration: f64) -> Option<Vec<f64>> {
    if !(model.spectral_radius() < 1.0) {
        return None;
    }
    let gain = model.dc_gain()?[(0, 0)];
    if !(gain.abs() > 1e-12) {
        return None;
    }
    let rec = step_response(model, duration, None).ok()?;
    Some(rec.output(0).iter().map(|y| y / gain).collect())
}

/// Fit `100·(1 − ‖y − ŷ‖/‖y − ȳ‖)` of `model` simulated on the record's input
/// against a reference output.
pub fn simulation_fit(model: &DiscreteStateSpace, record: &SignalRecord, reference: &[f64]) -> Result<f64> {
    let y = simulate_outputs(model, &record.input_matrix(), None)?;
    let mean = reference.iter().sum::<f64>() / reference.len() as f64;
    let err: f64 = reference.iter().zip(y.row(0).iter()).map(|(r, m)| (r - m).powi(2)).sum::<f64>().sqrt();
    let spread: f64 = reference.iter().map(|r| (r - mean).powi(2)).sum::<f64>().sqrt();
    if !(spread > 0.0) {
        return Err(SidError::Domain("reference output is constant".into()));
    }
    Ok(100.0 * (1.0 - err / spread))
}
