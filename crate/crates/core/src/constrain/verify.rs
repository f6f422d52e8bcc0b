use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::problem::{build_constraint, SdpProblem, SdpSolution};
use crate::error::Result;
use crate::linalg::{eigenvalues, sym_min_eig};

/// Independent check of a solution against its problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub eigenvalues: Vec<Complex64>,
    pub inside: Vec<bool>,
    pub lmi_min_eig: f64,
    pub p_min_eig: f64,
    pub residual: f64,
    pub tol: f64,
}

impl VerificationReport {
    /// Every eigenvalue inside the region, the LMI and `P` positive semidefinite (to `tol`).
    pub fn passed(&self) -> bool {
        self.inside.iter().all(|b| *b) && self.lmi_min_eig >= -self.tol && self.p_min_eig > 0.0
    }
}

pub fn verify_solution(problem: &SdpProblem, sol: &SdpSolution, tol: f64) -> Result<VerificationReport> {
    let eig = eigenvalues(&sol.a_hat);
    let inside = eig.iter().map(|z| problem.region.contains(*z, tol)).collect();
    let lmi = build_constraint(&problem.region, &sol.p, &sol.q)?;
    let p_min_eig = sym_min_eig(&sol.p);
    Ok(VerificationReport {
        eigenvalues: eig,
        inside,
        lmi_min_eig: sym_min_eig(&lmi),
        p_min_eig,
        residual: (&problem.a_star * &sol.p - &sol.q).norm(),
        tol,
    })
}
