//! Re-estimation of the state matrix under an LMI eigenvalue region:
//! minimize `‖A*P − Q‖²_F` subject to `λ⊗P + β⊗Q + βᵀ⊗Qᵀ ⪰ 0` and `P ⪰ p_floor·I`,
//! then `Â = QP⁻¹`.

mod problem;
mod solver;
mod verify;

pub use problem::{build_constraint, SdpProblem, SdpSolution, SolverOptions, SolverStatus, TraceRow};
pub use solver::solve_constrained;
pub use verify::{verify_solution, VerificationReport};
