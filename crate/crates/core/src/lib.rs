//! Gray-box subspace identification: step-response priors mapped onto convex
//! LMI eigenvalue regions, and re-estimation of the state matrix under those
//! regions.

// Negated comparisons deliberately reject NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constrain;
pub mod error;
pub mod features;
pub mod linalg;
pub mod lti;
pub mod region;
pub mod subspace;
pub mod workbench;

pub use error::{Result, SidError, StageContext};
