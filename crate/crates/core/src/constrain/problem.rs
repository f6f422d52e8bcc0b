use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{dim, Result};
use crate::linalg::{kron, rows_serde};
use crate::region::{LmiRegion, RegionFile};

/// `λ⊗P + β⊗Q + βᵀ⊗Qᵀ`, symmetrized to remove rounding asymmetry.
pub fn build_constraint(region: &LmiRegion, p: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = p.nrows();
    if p.ncols() != n || q.shape() != (n, n) {
        return dim(format!("P and Q must be square and equal, got {:?} and {:?}", p.shape(), q.shape()));
    }
    let m = kron(region.lambda(), p) + kron(region.beta(), q) + kron(&region.beta().transpose(), &q.transpose());
    Ok((&m + m.transpose()) * 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Stop once the certified gap bound falls below `gap_abs + gap_rel·objective`.
    pub gap_rel: f64,
    pub gap_abs: f64,
    /// Cap on Newton steps over all barrier stages.
    pub max_iterations: usize,
    /// Barrier weight multiplier between stages.
    pub growth: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { gap_rel: 1e-8, gap_abs: 1e-10, max_iterations: 200, growth: 10.0 }
    }
}

/// One constrained re-estimation problem.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub a_star: DMatrix<f64>,
    pub region: LmiRegion,
    /// Normalization `P ⪰ p_floor·I`; fixes the joint scale of `(P, Q)`.
    pub p_floor: f64,
    pub options: SolverOptions,
}

impl SdpProblem {
    pub fn new(a_star: DMatrix<f64>, region: LmiRegion) -> Self {
        Self { a_star, region, p_floor: 1.0, options: SolverOptions::default() }
    }

    pub fn to_file(&self) -> SdpProblemFile {
        SdpProblemFile {
            a_star: self.a_star.clone(),
            region: self.region.to_file(),
            p_floor: self.p_floor,
            options: self.options,
        }
    }
}

/// JSON form of [`SdpProblem`] with row-major matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblemFile {
    #[serde(with = "rows_serde")]
    pub a_star: DMatrix<f64>,
    pub region: RegionFile,
    #[serde(default = "one")]
    pub p_floor: f64,
    #[serde(default)]
    pub options: SolverOptions,
}

fn one() -> f64 {
    1.0
}

impl SdpProblemFile {
    pub fn to_problem(&self) -> Result<SdpProblem> {
        Ok(SdpProblem {
            a_star: self.a_star.clone(),
            region: self.region.to_region()?,
            p_floor: self.p_floor,
            options: self.options,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    MaxIterations,
}

/// One Newton step of the barrier method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub stage: usize,
    pub t: f64,
    pub objective: f64,
    /// Certified bound `ν/t` on the objective suboptimality at the stage's center.
    pub gap: f64,
    pub decrement: f64,
    pub step: f64,
    pub lmi_min_eig: f64,
    pub p_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    #[serde(with = "rows_serde")]
    pub p: DMatrix<f64>,
    #[serde(with = "rows_serde")]
    pub q: DMatrix<f64>,
    #[serde(with = "rows_serde")]
    pub a_hat: DMatrix<f64>,
    pub objective: f64,
    pub status: SolverStatus,
    pub iterations: usize,
    pub gap: f64,
    pub cond_p: f64,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

impl SdpSolution {
    pub fn write_trace<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.trace {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }
}
