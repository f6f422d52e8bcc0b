//! Repeated identification over independent noise realizations.

use std::fs::{self, File};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::pipeline::eigen_figure;
use super::plot::{Figure, Series, PALETTE};
use super::study::{case_regions, derive_seed, normalized_step, run_once, step_test, CaseRegion, RunOutcome, SeedStream};
use crate::constrain::SolverStatus;
use crate::error::{Result, SidError, StageContext};
use crate::lti::DiscreteStateSpace;

/// Command-line overrides of the configured Monte Carlo settings.
#[derive(Debug, Clone, Copy, Default)]
pub struct MonteCarloOverrides {
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case: String,
    pub solved: usize,
    pub failed: usize,
    pub max_iterations: usize,
    /// Runs whose every constrained eigenvalue lies in the region.
    pub inside: usize,
    pub verified: usize,
    pub unstable: usize,
    pub mean_objective: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnconstrainedSummary {
    pub identified: usize,
    pub failed: usize,
    /// Runs with spectral radius ≥ 1.
    pub unstable: usize,
    pub max_spectral_radius: Option<f64>,
}

/// Mean ± standard deviation of normalized step responses across runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepBand {
    pub model: String,
    /// Runs that contributed (stable, nonzero static gain).
    pub count: usize,
    pub time: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub name: String,
    pub master_seed: u64,
    pub runs: usize,
    pub cases: Vec<String>,
    pub regions: Vec<CaseRegion>,
    pub outcomes: Vec<RunOutcome>,
    pub unconstrained: UnconstrainedSummary,
    pub summary: Vec<CaseSummary>,
    pub bands: Vec<StepBand>,
    #[serde(skip)]
    pub plant: Option<DiscreteStateSpace>,
}

impl MonteCarloReport {
    pub fn case_summary(&self, case: &str) -> Option<&CaseSummary> {
        self.summary.iter().find(|s| s.case == case)
    }
}

fn band(model: &str, ts: f64, rows: &[Vec<f64>]) -> Option<StepBand> {
    let len = rows.first()?.len();
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..len).map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / n).collect();
    let std = (0..len)
        .map(|k| {
            if rows.len() < 2 {
                return 0.0;
            }
            (rows.iter().map(|r| (r[k] - mean[k]).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        })
        .collect();
    Some(StepBand {
        model: model.to_string(),
        count: rows.len(),
        time: (0..len).map(|k| k as f64 * ts).collect(),
        mean,
        std,
    })
}

/// Regions are built once from the step test, then every run identifies
/// from its own noise realization and is constrained by each region.
///
/// Runs execute concurrently; each owns its seed and scratch state and the
/// report is assembled in run order, so results do not depend on the worker
/// count. Per-run failures are recorded, not fatal.
pub fn run_montecarlo(cfg: &ExperimentConfig, ov: MonteCarloOverrides) -> Result<MonteCarloReport> {
    cfg.validate().stage("config")?;
    let runs = ov.runs.unwrap_or(cfg.montecarlo.runs);
    if runs == 0 {
        return Err(SidError::Config("run count must be at least 1".into()));
    }
    let master = ov.seed.unwrap_or(cfg.montecarlo.seed);
    let workers = ov.workers.unwrap_or(cfg.montecarlo.workers);
    let plant = cfg.plant_model().stage("plant")?;
    let (step_noisy, _) = step_test(cfg, &plant, derive_seed(master, SeedStream::StepTest, 0)).stage("step-test")?;
    let regions = case_regions(cfg, &step_noisy)?;
    let duration = cfg.step_test.duration;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SidError::Config(format!("cannot start {workers} workers: {e}")))?;
    let results: Vec<(RunOutcome, Vec<Option<Vec<f64>>>)> = pool.install(|| {
        (0..runs)
            .into_par_iter()
            .map(|i| {
                let mut out = run_once(cfg, &plant, &regions, i, derive_seed(master, SeedStream::Run, i as u64));
                let mut steps = vec![out.model.as_ref().and_then(|m| normalized_step(m, duration))];
                steps.extend(out.cases.iter().map(|c| c.model.as_ref().and_then(|m| normalized_step(m, duration))));
                // keep the report light: raw records are not needed after the run
                out.record = None;
                out.clean_output = Vec::new();
                (out, steps)
            })
            .collect()
    });

    let names: Vec<String> = regions.iter().map(|r| r.name.clone()).collect();
    let mut bands = Vec::new();
    let model_names: Vec<String> = std::iter::once("unconstrained".to_string()).chain(names.iter().cloned()).collect();
    for (j, name) in model_names.iter().enumerate() {
        let rows: Vec<Vec<f64>> = results.iter().filter_map(|(_, s)| s.get(j).cloned().flatten()).collect();
        if let Some(b) = band(name, cfg.ts, &rows) {
            bands.push(b);
        }
    }
    if let Some(truth) = normalized_step(&plant, duration) {
        bands.push(StepBand {
            model: "true".into(),
            count: 1,
            time: (0..truth.len()).map(|k| k as f64 * cfg.ts).collect(),
            std: vec![0.0; truth.len()],
            mean: truth,
        });
    }

    let outcomes: Vec<RunOutcome> = results.into_iter().map(|(o, _)| o).collect();
    let radii: Vec<f64> = outcomes.iter().filter_map(|o| o.spectral_radius).collect();
    let unconstrained = UnconstrainedSummary {
        identified: radii.len(),
        failed: outcomes.len() - radii.len(),
        unstable: radii.iter().filter(|r| **r >= 1.0).count(),
        max_spectral_radius: radii.iter().cloned().reduce(f64::max),
    };
    let summary = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let runs: Vec<_> = outcomes.iter().filter_map(|o| o.cases.get(j)).collect();
            let solved: Vec<_> = runs.iter().filter(|c| c.error.is_none()).collect();
            let objectives: Vec<f64> = solved.iter().filter_map(|c| c.objective).collect();
            CaseSummary {
                case: name.clone(),
                solved: solved.len(),
                failed: outcomes.len() - solved.len(),
                max_iterations: solved.iter().filter(|c| c.status == Some(SolverStatus::MaxIterations)).count(),
                inside: solved.iter().filter(|c| c.all_inside).count(),
                verified: solved.iter().filter(|c| c.verified).count(),
                unstable: solved.iter().filter(|c| c.spectral_radius.is_some_and(|r| r >= 1.0)).count(),
                mean_objective: (!objectives.is_empty()).then(|| objectives.iter().sum::<f64>() / objectives.len() as f64),
            }
        })
        .collect();
    Ok(MonteCarloReport {
        name: cfg.name.clone(),
        master_seed: master,
        runs,
        cases: names,
        regions,
        outcomes,
        unconstrained,
        summary,
        bands,
        plant: Some(plant),
    })
}

/// Writes the report, per-run tables, eigenvalue scatter (`scatter.*`) and
/// step bands (`step_bands.csv` table, `step_responses.*` figure).
pub fn write_montecarlo(report: &MonteCarloReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir.join("regions"))?;
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(dir.join("report.json"), text)?;
    for r in &report.regions {
        let mut text = serde_json::to_string_pretty(&r.region().to_file())?;
        text.push('\n');
        fs::write(dir.join("regions").join(format!("{}.json", r.name)), text)?;
    }

    let mut runs = csv::Writer::from_writer(File::create(dir.join("runs.csv"))?);
    runs.write_record(["run", "seed", "model", "status", "objective", "iterations", "spectral_radius", "all_inside", "verified", "error"])?;
    let mut eig = csv::Writer::from_writer(File::create(dir.join("eigenvalues.csv"))?);
    eig.write_record(["run", "model", "index", "re", "im", "inside"])?;
    for o in &report.outcomes {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        runs.write_record([
            o.run.to_string(),
            o.seed.to_string(),
            "unconstrained".into(),
            if o.error.is_some() { "failed".into() } else { "identified".into() },
            String::new(),
            String::new(),
            opt(o.spectral_radius),
            String::new(),
            String::new(),
            o.error.clone().unwrap_or_default(),
        ])?;
        for (k, z) in o.eigenvalues.iter().enumerate() {
            eig.write_record([o.run.to_string(), "unconstrained".into(), k.to_string(), z.re.to_string(), z.im.to_string(), String::new()])?;
        }
        for c in &o.cases {
            let status = match c.status {
                Some(SolverStatus::Optimal) => "optimal",
                Some(SolverStatus::MaxIterations) => "max-iterations",
                Some(SolverStatus::Infeasible) => "infeasible",
                None => "failed",
            };
            runs.write_record([
                o.run.to_string(),
                o.seed.to_string(),
                c.case.clone(),
                status.into(),
                opt(c.objective),
                c.iterations.to_string(),
                opt(c.spectral_radius),
                c.all_inside.to_string(),
                c.verified.to_string(),
                c.error.clone().unwrap_or_default(),
            ])?;
            for (k, (z, inside)) in c.eigenvalues.iter().zip(&c.inside).enumerate() {
                eig.write_record([o.run.to_string(), c.case.clone(), k.to_string(), z.re.to_string(), z.im.to_string(), inside.to_string()])?;
            }
        }
    }
    runs.flush()?;
    eig.flush()?;

    let mut bands = csv::Writer::from_writer(File::create(dir.join("step_bands.csv"))?);
    bands.write_record(["model", "count", "t", "mean", "std"])?;
    for b in &report.bands {
        for k in 0..b.time.len() {
            bands.write_record([b.model.clone(), b.count.to_string(), b.time[k].to_string(), b.mean[k].to_string(), b.std[k].to_string()])?;
        }
    }
    bands.flush()?;

    if let Some(plant) = &report.plant {
        let unconstrained: Vec<_> = report.outcomes.iter().flat_map(|o| o.eigenvalues.iter().copied()).collect();
        let constrained: Vec<_> = report
            .cases
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let z = report.outcomes.iter().filter_map(|o| o.cases.get(j)).flat_map(|c| c.eigenvalues.iter().copied()).collect();
                (name.clone(), z)
            })
            .collect();
        eigen_figure(&report.name, plant, &report.regions, &unconstrained, &constrained).save(dir, "scatter")?;
    }

    let mut fig = Figure::new(format!("{}: normalized step responses", report.name), "t [s]", "y / gain");
    for (i, b) in report.bands.iter().enumerate() {
        let color = if b.model == "true" { "#000000" } else { PALETTE[i % PALETTE.len()] };
        let pts = |sign: f64| b.time.iter().zip(b.mean.iter().zip(&b.std)).map(|(t, (m, s))| (*t, m + sign * s)).collect();
        fig.push(Series::line(format!("{} mean", b.model), color, pts(0.0)));
        if b.model != "true" {
            fig.push(Series::line(format!("{} +std", b.model), color, pts(1.0)));
            fig.push(Series::line(format!("{} -std", b.model), color, pts(-1.0)));
        }
    }
    fig.save(dir, "step_responses")?;
    Ok(())
}
