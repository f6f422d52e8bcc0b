//! Declarative experiment description: plant, excitation, noise,
//! identification, step test, priors and region cases.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constrain::SolverOptions;
use crate::error::{Result, SidError};
use crate::features::{
    Deltas, DampingRule, ExtremaSelector, FeatureConfig, PriorEstimates, RegionFlags, SpreadRule,
};
use crate::lti::{
    c2d_zoh, second_order_tf, tf_to_ss, DiscreteStateSpace, ModelFile, TransferFunction,
};
use crate::subspace::HankelConfig;

/// Schema version understood by this build.
pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlantSpec {
    /// `K·wn² / (s² + 2ζwn·s + wn²)`.
    SecondOrder { k: f64, zeta: f64, wn: f64 },
    TransferFunction { num: Vec<f64>, den: Vec<f64> },
    /// JSON model file; continuous models are discretized at the experiment period.
    ModelFile { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationSpec {
    pub bits: u32,
    pub hold: usize,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Record length in seconds.
    pub duration: f64,
    /// LFSR seed; the same input is used in every Monte Carlo run.
    #[serde(default = "one_u64")]
    pub seed: u64,
}

/// Output noise: white Gaussian `sigma` optionally shaped by `filter`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub filter: Option<TransferFunction>,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepTestSpec {
    pub duration: f64,
    /// Noise is rescaled per realization to this step-segment SNR; `None`
    /// leaves the step test noise-free.
    pub snr_db: Option<f64>,
}

/// Where a case's priors come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum PriorSource {
    /// Given estimates, aggregated with `spread` when several are listed.
    Values {
        estimates: Vec<PriorValues>,
        #[serde(default)]
        spread: SpreadRule,
        /// Overrides the aggregated spread.
        #[serde(default)]
        deltas: Option<Deltas>,
    },
    /// Read from the experiment's step test, one estimate per selector.
    StepTest {
        selectors: Vec<ExtremaSelector>,
        #[serde(default)]
        damping_rule: DampingRule,
        #[serde(default)]
        spread: SpreadRule,
        #[serde(default)]
        deltas: Option<Deltas>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorValues {
    pub zeta: Option<f64>,
    pub wd: Option<f64>,
    pub zeta_wn: Option<f64>,
}

impl PriorValues {
    pub fn to_estimates(self) -> PriorEstimates {
        PriorEstimates {
            zeta_hat: self.zeta,
            wd_hat: self.wd,
            zeta_wn_hat: self.zeta_wn,
            provenance: Default::default(),
        }
    }
}

/// One constrained variant of the study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub name: String,
    pub priors: PriorSource,
    pub flags: RegionFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloSpec {
    pub runs: usize,
    /// Master seed; every run seed is drawn from it.
    pub seed: u64,
    /// Worker threads, `0` for one per core.
    pub workers: usize,
}

impl Default for MonteCarloSpec {
    fn default() -> Self {
        Self { runs: 1, seed: 0, workers: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub name: String,
    pub plant: PlantSpec,
    /// Sampling period in seconds.
    pub ts: f64,
    pub excitation: ExcitationSpec,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub identification: HankelConfig,
    pub step_test: StepTestSpec,
    #[serde(default)]
    pub features: FeatureConfig,
    pub cases: Vec<CaseSpec>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub montecarlo: MonteCarloSpec,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    /// Directory that relative paths resolve against; set when loading.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn one() -> f64 {
    1.0
}

fn one_u64() -> u64 {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| SidError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Reads, parses and validates a config file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| SidError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SidError::Config(msg));
        if self.version != CONFIG_VERSION {
            return bad(format!("unsupported config version {} (expected {CONFIG_VERSION})", self.version));
        }
        if !(self.ts > 0.0) {
            return bad(format!("sampling period must be positive, got {}", self.ts));
        }
        if !(self.excitation.duration > 0.0) || !(self.step_test.duration > 0.0) {
            return bad("record durations must be positive".into());
        }
        if self.excitation.hold == 0 {
            return bad("PRBS hold must be at least one sample".into());
        }
        if !(self.noise.sigma >= 0.0) {
            return bad(format!("noise sigma must be nonnegative, got {}", self.noise.sigma));
        }
        if self.montecarlo.runs == 0 {
            return bad("run count must be at least 1".into());
        }
        if let PlantSpec::ModelFile { path } = &self.plant {
            let full = self.resolve(path);
            if !full.is_file() {
                return bad(format!("plant model file {} does not exist", full.display()));
            }
        }
        let mut names = std::collections::BTreeSet::new();
        for case in &self.cases {
            if !names.insert(case.name.as_str()) {
                return bad(format!("duplicate case name {:?}", case.name));
            }
            let empty = match &case.priors {
                PriorSource::Values { estimates, .. } => estimates.is_empty(),
                PriorSource::StepTest { selectors, .. } => selectors.is_empty(),
            };
            if empty {
                return bad(format!("case {:?} lists no prior estimates", case.name));
            }
        }
        Ok(())
    }

    /// Discrete plant at the experiment's sampling period.
    pub fn plant_model(&self) -> Result<DiscreteStateSpace> {
        let continuous = |tf: TransferFunction| c2d_zoh(&tf_to_ss(&tf)?, self.ts);
        match &self.plant {
            PlantSpec::SecondOrder { k, zeta, wn } => continuous(second_order_tf(*k, *zeta, *wn)?),
            PlantSpec::TransferFunction { num, den } => {
                continuous(TransferFunction::new(num.clone(), den.clone())?)
            }
            PlantSpec::ModelFile { path } => {
                let text = std::fs::read_to_string(self.resolve(path))?;
                let file: ModelFile = serde_json::from_str(&text)?;
                match file.ts {
                    Some(ts) if (ts - self.ts).abs() > 1e-12 * self.ts => Err(SidError::Config(format!(
                        "model file sampled at {ts} s, experiment at {} s",
                        self.ts
                    ))),
                    Some(_) => file.to_discrete(),
                    None => c2d_zoh(&file.to_continuous()?, self.ts),
                }
            }
        }
    }

    pub fn case(&self, name: &str) -> Option<&CaseSpec> {
        self.cases.iter().find(|c| c.name == name)
    }
}
