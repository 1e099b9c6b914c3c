//! Minimal transport cost over marginal-constrained channels, solved as a
//! semidefinite program over Choi matrices.

mod admm;
mod anderson;
mod certificate;
mod problem;

pub use admm::{hvec, solve, unhvec, SdpSolution, SolverParams, SolverStatus};
pub use certificate::{
    certify, CertificateReport, COMPLEMENTARITY_TOL, CONSTRAINT_TOL, DUAL_SLACK_TOL, GAP_TOL, PSD_MARGIN_TOL,
    ROUND_TRIP_TOL,
};
pub use problem::{build_sdp, hermitian_basis, Constraint, SdpProblem};

use crate::error::Result;
use crate::quantum::{DensityMatrix, ObservableTuple};

/// Solves the transport problem from `sigma` to `rho` with the same
/// observables on both sides; `divergence` of the result is the distance.
pub fn divergence(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    xs: &ObservableTuple,
    params: &SolverParams,
) -> Result<SdpSolution> {
    solve(&build_sdp(rho, sigma, xs, xs)?, params)
}
