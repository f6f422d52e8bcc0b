use thiserror::Error;

/// Errors raised across the identification workbench.
#[derive(Debug, Error)]
pub enum SidError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("improper transfer function: numerator degree {num} exceeds denominator degree {den}")]
    Improper { num: usize, den: usize },

    #[error("sampling period must be positive, got {0}")]
    SamplingPeriod(f64),

    #[error("sampling rate too low: {0}")]
    SamplingRate(String),

    #[error("unsupported LFSR register size {0} (tabled sizes are 2..=32)")]
    RegisterSize(u32),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    #[error("feature unavailable: {0}")]
    MissingFeature(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("{stage} stage: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SidError>,
    },
}

impl SidError {
    /// Innermost error beneath any stage tags.
    pub fn root(&self) -> &SidError {
        match self {
            SidError::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Tags errors with the pipeline stage that raised them.
pub trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| match e {
            tagged @ SidError::Stage { .. } => tagged,
            e => SidError::Stage { stage, source: Box::new(e) },
        })
    }
}

pub type Result<T> = std::result::Result<T, SidError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(SidError::Domain(msg.into()))
}

pub(crate) fn dim<T>(msg: impl Into<String>) -> Result<T> {
    Err(SidError::Dimension(msg.into()))
}
