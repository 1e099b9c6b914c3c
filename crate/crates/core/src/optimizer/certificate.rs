use serde::{Deserialize, Serialize};

use super::admm::SdpSolution;
use super::problem::SdpProblem;
use crate::kms::cost_unchecked;
use crate::linalg::{hermitian_eig, hs_inner, partial_trace, ComplexMatrix, Factor};
use crate::quantum::{kraus_from_choi_matrix, KrausChannel};

pub const CONSTRAINT_TOL: f64 = 1e-8;
pub const PSD_MARGIN_TOL: f64 = 1e-9;
pub const DUAL_SLACK_TOL: f64 = 1e-6;
pub const COMPLEMENTARITY_TOL: f64 = 1e-6;
pub const GAP_TOL: f64 = 1e-6;
pub const ROUND_TRIP_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// Largest `|tr(G_i J) - b_i|`.
    pub max_constraint_violation: f64,
    /// Frobenius norm of `Tr_H J - 1_K`.
    pub unitality_residual: f64,
    /// Frobenius norm of `Tr_K[J (1 (x) sigma)] - rho^T`.
    pub marginal_residual: f64,
    /// Smallest eigenvalue of `J`.
    pub psd_margin: f64,
    /// Smallest eigenvalue of the dual slack `C - sum_i y_i G_i` of the
    /// coupling form.
    pub dual_slack_margin: f64,
    /// `|<slack, K>|` with `K` the coupling variable of `J`.
    pub complementarity: f64,
    pub duality_gap: f64,
    /// Cost of the Kraus family recovered from `J`.
    pub round_trip_cost: f64,
    pub round_trip_mismatch: f64,
    pub flags: Vec<String>,
    pub passed: bool,
}

/// Recomputes every optimality ingredient of `solution` from the complex data.
pub fn certify(solution: &SdpSolution, problem: &SdpProblem) -> CertificateReport {
    let j = solution.choi.matrix();
    let (n, m) = (problem.dim_in, problem.dim_out);
    let mut flags = Vec::new();

    let max_constraint_violation = match problem.constraint_violations(j) {
        Ok(v) => v.iter().fold(0.0f64, |a, b| a.max(b.abs())),
        Err(e) => {
            flags.push(format!("constraints: {e}"));
            f64::INFINITY
        }
    };
    if max_constraint_violation > CONSTRAINT_TOL {
        flags.push(format!("constraint violation {max_constraint_violation:e}"));
    }

    let unitality_residual = partial_trace(j, (n, m), Factor::First)
        .map(|t| (&t - &ComplexMatrix::identity(m)).frobenius_norm())
        .unwrap_or(f64::INFINITY);
    let marginal_residual = j
        .matmul(&ComplexMatrix::identity(n).kron(problem.sigma.matrix()))
        .and_then(|p| partial_trace(&p, (n, m), Factor::Second))
        .map(|t| (&t - &problem.rho.matrix().transpose()).frobenius_norm())
        .unwrap_or(f64::INFINITY);
    if unitality_residual > CONSTRAINT_TOL {
        flags.push(format!("unitality residual {unitality_residual:e}"));
    }
    if marginal_residual > CONSTRAINT_TOL {
        flags.push(format!("marginal residual {marginal_residual:e}"));
    }

    let psd_margin = min_eigenvalue(&j.hermitian_part());
    if psd_margin < -PSD_MARGIN_TOL {
        flags.push(format!("Choi matrix has eigenvalue {psd_margin:e}"));
    }

    // dual pairing lives on the coupling form
    let cf = &problem.coupling;
    let k = cf.pull_back(j);
    let mut slack = cf.objective.clone();
    for (c, y) in cf.constraints.iter().zip(&solution.dual) {
        slack -= &c.matrix.scale_real(*y);
    }
    let dual_slack_margin = min_eigenvalue(&slack);
    if dual_slack_margin < -DUAL_SLACK_TOL {
        flags.push(format!("dual slack has eigenvalue {dual_slack_margin:e}"));
    }
    let complementarity = hs_inner(&slack, &k).map(|z| z.re.abs()).unwrap_or(f64::INFINITY);
    if complementarity > COMPLEMENTARITY_TOL {
        flags.push(format!("complementarity {complementarity:e}"));
    }

    let dual_value: f64 = cf.constraints.iter().zip(&solution.dual).map(|(c, y)| c.target * y).sum();
    let duality_gap =
        problem.objective_value(j).map(|p| p - problem.objective_constant - dual_value).unwrap_or(f64::INFINITY);
    if duality_gap.abs() > GAP_TOL {
        flags.push(format!("duality gap {duality_gap:e}"));
    }

    let round_trip_cost = kraus_from_choi_matrix(&j.hermitian_part(), n, m, 1e-12)
        .and_then(KrausChannel::unchecked)
        .and_then(|ch| cost_unchecked(&ch, &problem.rho, &problem.sigma, &problem.xs, &problem.ys))
        .map(|r| r.total)
        .unwrap_or(f64::NAN);
    let round_trip_mismatch = (round_trip_cost - solution.optimal_cost).abs();
    if !(round_trip_mismatch <= ROUND_TRIP_TOL) {
        flags.push(format!("round-trip cost mismatch {round_trip_mismatch:e}"));
    }

    CertificateReport {
        max_constraint_violation,
        unitality_residual,
        marginal_residual,
        psd_margin,
        dual_slack_margin,
        complementarity,
        duality_gap,
        round_trip_cost,
        round_trip_mismatch,
        passed: flags.is_empty(),
        flags,
    }
}

fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eig(&m.hermitian_part()).map(|e| e.min_eigenvalue()).unwrap_or(f64::NAN)
}
