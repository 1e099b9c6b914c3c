//! Cost, integral representation and divergence entry points.

use qot_core::integral::verify_integral_rep;
use qot_core::kms::{cost, kms_inner};
use qot_core::optimizer::{build_sdp, certify, solve, SolverParams, SolverStatus};

use crate::objects::{QotChannel, QotObservables, QotQuadrature, QotState};
use crate::{borrow, guard, read_matrix, store, QotStatus};

/// Direct cost against its quadrature.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QotIntegralCheck {
    pub cost: f64,
    pub quadrature: f64,
    /// `|cost - quadrature|`
    pub gap: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QotSolverParams {
    pub step: f64,
    pub max_iter: usize,
    pub tol_primal: f64,
    pub tol_dual: f64,
    pub tol_gap: f64,
    /// In `(0, 2)`.
    pub over_relaxation: f64,
    pub adaptive_step: bool,
    /// 0 disables acceleration.
    pub anderson_memory: usize,
}

impl From<SolverParams> for QotSolverParams {
    fn from(p: SolverParams) -> Self {
        Self {
            step: p.step,
            max_iter: p.max_iter,
            tol_primal: p.tol_primal,
            tol_dual: p.tol_dual,
            tol_gap: p.tol_gap,
            over_relaxation: p.over_relaxation,
            adaptive_step: p.adaptive_step,
            anderson_memory: p.anderson_memory,
        }
    }
}

impl From<QotSolverParams> for SolverParams {
    fn from(p: QotSolverParams) -> Self {
        Self {
            step: p.step,
            max_iter: p.max_iter,
            tol_primal: p.tol_primal,
            tol_dual: p.tol_dual,
            tol_gap: p.tol_gap,
            over_relaxation: p.over_relaxation,
            adaptive_step: p.adaptive_step,
            anderson_memory: p.anderson_memory,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QotSolverStatus {
    Optimal = 0,
    MaxIterations = 1,
    NumericalFailure = 2,
}

impl From<SolverStatus> for QotSolverStatus {
    fn from(s: SolverStatus) -> Self {
        match s {
            SolverStatus::Optimal => Self::Optimal,
            SolverStatus::MaxIterations => Self::MaxIterations,
            SolverStatus::NumericalFailure => Self::NumericalFailure,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QotDivergence {
    /// Minimal transport cost (squared divergence).
    pub optimal_cost: f64,
    pub divergence: f64,
    pub duality_gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub status: QotSolverStatus,
    /// The optimality certificate of the returned channel passed.
    pub certified: bool,
}

/// Default solver parameters.
#[no_mangle]
pub extern "C" fn qot_solver_params_default() -> QotSolverParams {
    SolverParams::default().into()
}

/// KMS inner product `tr(a^* rho^{1/2} b rho^{1/2})` of two `dim x dim`
/// matrices, `dim` being the dimension of `rho`.
///
/// # Safety
/// `a` and `b` must point to `2 dim^2` doubles; `rho` must be a live handle;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_kms_inner(a: *const f64, b: *const f64, rho: *const QotState, out: *mut f64) -> QotStatus {
    guard(|| {
        let rho = &borrow(rho, "rho")?.0;
        let n = rho.dim();
        store(out, kms_inner(&read_matrix(a, n, n)?, &read_matrix(b, n, n)?, rho)?)
    })
}

/// Transport cost of `ch` between `rho` (input space) and `sigma` (output
/// space) with cost tuples `xs` and `ys`. Fails with
/// `QOT_STATUS_MARGINAL_MISMATCH` unless `Phi_*(sigma) = rho`.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_cost(
    ch: *const QotChannel,
    rho: *const QotState,
    sigma: *const QotState,
    xs: *const QotObservables,
    ys: *const QotObservables,
    out: *mut f64,
) -> QotStatus {
    guard(|| {
        let report = cost(
            &borrow(ch, "channel")?.0,
            &borrow(rho, "rho")?.0,
            &borrow(sigma, "sigma")?.0,
            &borrow(xs, "xs")?.0,
            &borrow(ys, "ys")?.0,
        )?;
        store(out, report.total)
    })
}

/// Compares the cost of `ch` with the quadrature of its integral
/// representation.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_verify_integral_rep(
    ch: *const QotChannel,
    rho: *const QotState,
    sigma: *const QotState,
    xs: *const QotObservables,
    ys: *const QotObservables,
    rule: *const QotQuadrature,
    out: *mut QotIntegralCheck,
) -> QotStatus {
    guard(|| {
        let check = verify_integral_rep(
            &borrow(ch, "channel")?.0,
            &borrow(rho, "rho")?.0,
            &borrow(sigma, "sigma")?.0,
            &borrow(xs, "xs")?.0,
            &borrow(ys, "ys")?.0,
            &borrow(rule, "quadrature")?.0,
        )?;
        store(out, QotIntegralCheck { cost: check.lhs, quadrature: check.rhs, gap: check.gap })
    })
}

/// Wasserstein divergence between `rho` and `sigma` (same dimension) with
/// cost tuple `xs` on both sides. `params` may be NULL for the defaults.
/// A solve that stops at the iteration limit still returns `QOT_STATUS_OK`;
/// check `status` in the result.
///
/// # Safety
/// The handles must be live; `params` must be NULL or readable; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn qot_divergence(
    rho: *const QotState,
    sigma: *const QotState,
    xs: *const QotObservables,
    params: *const QotSolverParams,
    out: *mut QotDivergence,
) -> QotStatus {
    guard(|| {
        let xs = &borrow(xs, "xs")?.0;
        let problem = build_sdp(&borrow(rho, "rho")?.0, &borrow(sigma, "sigma")?.0, xs, xs)?;
        let params = params.as_ref().map_or_else(SolverParams::default, |p| (*p).into());
        let sol = solve(&problem, &params)?;
        let certified = certify(&sol, &problem).passed;
        store(
            out,
            QotDivergence {
                optimal_cost: sol.optimal_cost,
                divergence: sol.divergence,
                duality_gap: sol.duality_gap,
                primal_residual: sol.primal_residual,
                dual_residual: sol.dual_residual,
                iterations: sol.iterations,
                status: sol.status.into(),
                certified,
            },
        )
    })
}
