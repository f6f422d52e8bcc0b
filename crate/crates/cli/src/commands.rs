use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use sid_core::constrain::{SolverOptions, SolverStatus};
use sid_core::features::{extract_features, priors_from_features, DampingRule};
use sid_core::lti::{Channel, DiscreteStateSpace, ModelFile, SignalRecord};
use sid_core::region::boundary::{outline, unit_circle};
use sid_core::region::{LmiRegion, RegionFile};
use sid_core::workbench::plot::{Figure, Series, SeriesKind, PALETTE};
use sid_core::workbench::{
    case_regions, constrain_case, constrain_run, derive_seed, eigen_figure, features_figure, identification_record,
    identify_run, record_figure, region_figure, region_gallery, run_montecarlo, run_pipeline, simulation_fit,
    step_test, write_gallery, write_montecarlo, write_pipeline, write_priors_csv, CaseRegion, CaseRun,
    ExperimentConfig, GallerySpec, MonteCarloOverrides, SeedStream, OUTLINE_POINTS, OUTLINE_REACH,
};
use sid_core::{Result, SidError, StageContext};

use crate::{Command, Format, StageArgs};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(args) => simulate(&args),
        Command::Step(args) => step(&args),
        Command::Features(args) => features(&args),
        Command::Region { args, case } => region(&args, case.as_deref()),
        Command::Identify(args) => identify(&args),
        Command::Constrain { args, case, model, region } => constrain(&args, case.as_deref(), model, region),
        Command::Pipeline(args) => pipeline(&args),
        Command::Montecarlo { args, runs, workers } => montecarlo(&args, runs, workers),
        Command::Gallery { zeta, ts, wd, zeta_wn, out, format } => {
            gallery(GallerySpec { zetas: zeta, ts, wds: wd, zeta_wns: zeta_wn }, &out, format)
        }
    }
}

fn load(args: &StageArgs) -> Result<ExperimentConfig> {
    let path = args.config.as_ref().ok_or_else(|| SidError::Config("--config is required".into()))?;
    ExperimentConfig::load(path)
}

fn master_seed(cfg: &ExperimentConfig, args: &StageArgs) -> u64 {
    args.seed.unwrap_or(cfg.montecarlo.seed)
}

fn format_or(args: &StageArgs, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = args.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(SidError::Config(format!("format {f:?} is not available for this command").to_lowercase()));
    }
    Ok(f)
}

/// Writes one stage artifact to `<out>/<stem>.<ext>`, or to stdout without `--out`.
fn emit(args: &StageArgs, stem: &str, format: Format, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
        Format::Svg => "svg",
    };
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{stem}.{ext}"));
            let mut file = io::BufWriter::new(fs::File::create(&path)?);
            write(&mut file)?;
            file.flush()?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let mut stdout = io::stdout().lock();
            write(&mut stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn json_to<T: Serialize + ?Sized>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn svg_to(w: &mut dyn Write, fig: &Figure) -> Result<()> {
    w.write_all(fig.to_svg().as_bytes())?;
    Ok(())
}

fn simulate(args: &StageArgs) -> Result<()> {
    let cfg = load(args)?;
    let format = format_or(args, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let plant = cfg.plant_model().stage("plant")?;
    let seed = derive_seed(master_seed(&cfg, args), SeedStream::Run, 0);
    let (record, clean) = identification_record(&cfg, &plant, seed).stage("simulate")?;
    emit(args, "identification", format, |w| match format {
        Format::Csv => record.write_csv(w),
        Format::Json => json_to(w, &json!({ "seed": seed, "record": record, "clean_output": clean })),
        Format::Svg => svg_to(w, &record_figure("identification data", &[("noisy", &record)])),
    })
}

fn step(args: &StageArgs) -> Result<()> {
    let cfg = load(args)?;
    let format = format_or(args, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let plant = cfg.plant_model().stage("plant")?;
    let seed = derive_seed(master_seed(&cfg, args), SeedStream::StepTest, 0);
    let (noisy, clean) = step_test(&cfg, &plant, seed).stage("step-test")?;
    emit(args, "step_test", format, |w| match format {
        Format::Csv => {
            let mut both = noisy.clone();
            both.outputs.push(Channel { name: "y1_clean".into(), samples: clean.output(0).to_vec() });
            both.write_csv(w)
        }
        Format::Json => json_to(w, &json!({ "seed": seed, "noisy": noisy, "clean": clean })),
        Format::Svg => svg_to(w, &record_figure("step test", &[("noisy", &noisy), ("clean", &clean)])),
    })
}

fn noisy_step(cfg: &ExperimentConfig, args: &StageArgs) -> Result<SignalRecord> {
    let plant = cfg.plant_model().stage("plant")?;
    let seed = derive_seed(master_seed(cfg, args), SeedStream::StepTest, 0);
    Ok(step_test(cfg, &plant, seed).stage("step-test")?.0)
}

fn features(args: &StageArgs) -> Result<()> {
    let cfg = load(args)?;
    let format = format_or(args, Format::Json, &[Format::Csv, Format::Json, Format::Svg])?;
    let step = noisy_step(&cfg, args)?;
    let found = extract_features(&step, &cfg.features).stage("features")?;
    let priors = priors_from_features(&found, DampingRule::Linear).stage("features")?;
    let regions = case_regions(&cfg, &step)?;
    emit(args, "features", format, |w| match format {
        Format::Json => json_to(w, &json!({ "features": found, "priors": priors, "cases": regions })),
        Format::Csv => write_priors_csv(w, &regions),
        Format::Svg => svg_to(w, &features_figure("step-test features", &step, cfg.features.channel, &found)),
    })
}

fn select<'a>(regions: &'a [CaseRegion], case: Option<&str>) -> Result<Vec<&'a CaseRegion>> {
    match case {
        None => Ok(regions.iter().collect()),
        Some(name) => match regions.iter().find(|r| r.name == name) {
            Some(r) => Ok(vec![r]),
            None => Err(SidError::Config(format!("no case named {name:?}"))),
        },
    }
}

fn region(args: &StageArgs, case: Option<&str>) -> Result<()> {
    let cfg = load(args)?;
    let format = format_or(args, Format::Json, &[Format::Csv, Format::Json, Format::Svg])?;
    if let Some(name) = case {
        if cfg.case(name).is_none() {
            return Err(SidError::Config(format!("no case named {name:?}")));
        }
    }
    let step = noisy_step(&cfg, args)?;
    let regions = case_regions(&cfg, &step)?;
    let chosen: Vec<CaseRegion> = select(&regions, case)?.into_iter().cloned().collect();
    emit(args, "regions", format, |w| match format {
        Format::Json => {
            let out: Vec<_> = chosen.iter().map(|r| json!({ "priors": r, "region": r.region().to_file() })).collect();
            json_to(w, &out)
        }
        Format::Csv => region_figure("constraint regions", &chosen).write_csv(w),
        Format::Svg => svg_to(w, &region_figure("constraint regions", &chosen)),
    })
}

fn identify(args: &StageArgs) -> Result<()> {
    let cfg = load(args)?;
    let format = format_or(args, Format::Json, &[Format::Csv, Format::Json, Format::Svg])?;
    let plant = cfg.plant_model().stage("plant")?;
    let seed = derive_seed(master_seed(&cfg, args), SeedStream::Run, 0);
    let (record, clean, id) = identify_run(&cfg, &plant, seed)?;
    emit(args, "identified", format, |w| match format {
        Format::Json => json_to(
            w,
            &json!({
                "seed": seed,
                "order": id.order,
                "singular_values": id.singular_values,
                "eigenvalues": id.model.poles(),
                "spectral_radius": id.model.spectral_radius(),
                "fit": simulation_fit(&id.model, &record, &clean)?,
                "model": ModelFile::from_discrete(&id.model),
            }),
        ),
        Format::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["index", "singular_value"])?;
            for (i, s) in id.singular_values.iter().enumerate() {
                out.write_record([(i + 1).to_string(), s.to_string()])?;
            }
            out.flush()?;
            Ok(())
        }
        Format::Svg => svg_to(w, &eigen_figure("identified eigenvalues", &plant, &[], &id.model.poles(), &[])),
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| SidError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| SidError::Config(format!("{}: {e}", path.display())))
}

/// Fails with the typed error of the first unsolved case.
fn check_cases(cases: &[CaseRun]) -> Result<()> {
    for c in cases {
        match (c.status, &c.error) {
            (Some(SolverStatus::Infeasible), _) => {
                return Err(SidError::Infeasible(format!("case {}: region admits no real point", c.case))).stage("constrain")
            }
            (_, Some(e)) => return Err(SidError::Numerical(format!("case {}: {e}", c.case))).stage("constrain"),
            _ => {}
        }
    }
    Ok(())
}

fn case_json(c: &CaseRun) -> serde_json::Value {
    json!({
        "result": c,
        "solution": c.solution,
        "model": c.model.as_ref().map(ModelFile::from_discrete),
    })
}

fn constrain(args: &StageArgs, case: Option<&str>, model: Option<PathBuf>, region: Option<PathBuf>) -> Result<()> {
    let format = format_or(args, Format::Json, &[Format::Csv, Format::Json, Format::Svg])?;
    let (unconstrained, cases, fig): (DiscreteStateSpace, Vec<CaseRun>, Figure) = match (model, region) {
        (Some(model), Some(region)) => {
            let options = match &args.config {
                Some(_) => load(args)?.solver,
                None => SolverOptions::default(),
            };
            let m = read_json::<ModelFile>(&model)?.to_discrete().stage("model")?;
            let file: RegionFile = read_json(&region)?;
            let r = file.to_region().stage("region")?;
            let name = if r.label.is_empty() { "region".to_string() } else { r.label.clone() };
            let run = constrain_case(&m, &r, &name, &options);
            let fig = file_figure(&m, &r, &run);
            (m, vec![run], fig)
        }
        _ => {
            let cfg = load(args)?;
            if let Some(name) = case {
                if cfg.case(name).is_none() {
                    return Err(SidError::Config(format!("no case named {name:?}")));
                }
            }
            let plant = cfg.plant_model().stage("plant")?;
            let master = master_seed(&cfg, args);
            let (step, _) = step_test(&cfg, &plant, derive_seed(master, SeedStream::StepTest, 0)).stage("step-test")?;
            let regions = case_regions(&cfg, &step)?;
            let chosen: Vec<CaseRegion> = select(&regions, case)?.into_iter().cloned().collect();
            let seed = derive_seed(master, SeedStream::Run, 0);
            let data = identify_run(&cfg, &plant, seed)?;
            let run = constrain_run(&cfg, &chosen, 0, seed, data);
            let constrained: Vec<_> = run.cases.iter().map(|c| (c.case.clone(), c.eigenvalues.clone())).collect();
            let fig = eigen_figure("constrained eigenvalues", &plant, &chosen, &run.eigenvalues, &constrained);
            (run.model.expect("identified run keeps its model"), run.cases, fig)
        }
    };
    check_cases(&cases)?;
    emit(args, "constrained", format, |w| match format {
        Format::Json => json_to(
            w,
            &json!({
                "unconstrained": ModelFile::from_discrete(&unconstrained),
                "cases": cases.iter().map(case_json).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["case", "index", "re", "im", "inside"])?;
            for c in &cases {
                for (k, (z, inside)) in c.eigenvalues.iter().zip(&c.inside).enumerate() {
                    out.write_record([c.case.clone(), k.to_string(), z.re.to_string(), z.im.to_string(), inside.to_string()])?;
                }
            }
            out.flush()?;
            Ok(())
        }
        Format::Svg => svg_to(w, &fig),
    })
}

fn file_figure(model: &DiscreteStateSpace, region: &LmiRegion, run: &CaseRun) -> Figure {
    let mut fig = Figure::z_plane("constrained eigenvalues");
    fig.push(Series::from_complex("unit circle", "#999999", SeriesKind::Line, &unit_circle()));
    if let Some(pts) = outline(region, OUTLINE_REACH, OUTLINE_POINTS) {
        fig.push(Series::from_complex("region", PALETTE[1], SeriesKind::Line, &pts));
    }
    fig.push(Series::from_complex("unconstrained", PALETTE[0], SeriesKind::Markers, &model.poles()));
    fig.push(Series::from_complex("constrained", PALETTE[1], SeriesKind::Markers, &run.eigenvalues));
    fig
}

fn out_dir(cfg: &ExperimentConfig, args: &StageArgs) -> PathBuf {
    args.out.clone().unwrap_or_else(|| cfg.output_dir.clone())
}

fn pipeline(args: &StageArgs) -> Result<()> {
    let cfg = load(args)?;
    let format = format_or(args, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let res = run_pipeline(&cfg, args.seed)?;
    let dir = out_dir(&cfg, args);
    write_pipeline(&res, &dir).stage("write")?;
    if format == Format::Json {
        return json_to(&mut io::stdout().lock(), &res.validation);
    }
    let v = &res.validation;
    println!("{}: seed {}, order {}", cfg.name, res.master_seed, v.order);
    println!("  unconstrained  radius {:.6}  fit {:.2}%", v.unconstrained.spectral_radius, v.unconstrained.fit);
    for c in &v.cases {
        println!(
            "  {:<14} radius {:.6}  fit {:.2}%  objective {:.6e}  {} iterations",
            c.case, c.model.spectral_radius, c.model.fit, c.objective, c.iterations
        );
    }
    println!("  validation {}", if v.passed { "passed" } else { "FAILED" });
    println!("artifacts in {}", dir.display());
    Ok(())
}

fn montecarlo(args: &StageArgs, runs: Option<usize>, workers: Option<usize>) -> Result<()> {
    let cfg = load(args)?;
    let format = format_or(args, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let report = run_montecarlo(&cfg, MonteCarloOverrides { runs, seed: args.seed, workers })?;
    let dir = out_dir(&cfg, args);
    write_montecarlo(&report, &dir).stage("write")?;
    if format == Format::Json {
        return json_to(&mut io::stdout().lock(), &json!({ "unconstrained": report.unconstrained, "cases": report.summary }));
    }
    let u = &report.unconstrained;
    println!("{}: {} runs, master seed {}", report.name, report.runs, report.master_seed);
    println!(
        "  unconstrained  identified {}  unstable {}  max radius {}",
        u.identified,
        u.unstable,
        u.max_spectral_radius.map(|r| format!("{r:.6}")).unwrap_or_else(|| "-".into())
    );
    for s in &report.summary {
        println!(
            "  {:<14} solved {}  inside {}  verified {}  unstable {}  max-iterations {}",
            s.case, s.solved, s.inside, s.verified, s.unstable, s.max_iterations
        );
    }
    println!("artifacts in {}", dir.display());
    Ok(())
}

fn gallery(spec: GallerySpec, out: &Path, format: Option<Format>) -> Result<()> {
    let g = region_gallery(&spec)?;
    write_gallery(&g, out).stage("write")?;
    if format == Some(Format::Json) {
        return json_to(&mut io::stdout().lock(), &g.overshoot);
    }
    for (stem, _) in &g.figures {
        println!("{}", out.join(format!("gallery_{stem}.svg")).display());
    }
    Ok(())
}
