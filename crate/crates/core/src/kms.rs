//! KMS inner product, the embedding `x -> rho^{1/4} x rho^{1/4}`, and the
//! transport cost of a channel.
//!
//! For a channel `Phi` with `Phi_*(sigma) = rho` and cost tuples `x` on `H`,
//! `y` on `K`:
//!
//! ```text
//! C(Phi) = sum_k <x_k, x_k>_rho + <y_k, y_k>_sigma - 2 <Phi(x_k), y_k>_sigma
//! <a, b>_rho = tr(a^* rho^{1/2} b rho^{1/2})
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, QotError, Result};
use crate::linalg::{hermitian_trace_norm, hs_inner, ComplexMatrix};
use crate::quantum::{DensityMatrix, KrausChannel, ObservableTuple};
use crate::tolerances::{COST_FLOOR, MARGINAL_TOL, SUPPORT_TOL};

/// `tr(a^* rho^{1/2} b rho^{1/2})`, real part. Real and symmetric for Hermitian `a`, `b`.
pub fn kms_inner(a: &ComplexMatrix, b: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    let n = rho.dim();
    if a.shape() != (n, n) || b.shape() != (n, n) {
        return Err(dim_mismatch(format!(
            "KMS inner product of {:?} and {:?} with state of dim {n}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(kms_inner_with_sqrt(a, b, &rho.sqrt()))
}

fn kms_inner_with_sqrt(a: &ComplexMatrix, b: &ComplexMatrix, sqrt_rho: &ComplexMatrix) -> f64 {
    let sbs = &(sqrt_rho * b) * sqrt_rho;
    hs_inner(a, &sbs).expect("shapes checked").re
}

/// Hilbert-Schmidt operator together with the support projections it lives between.
#[derive(Clone, Debug, PartialEq)]
pub struct HsElement {
    pub matrix: ComplexMatrix,
    pub left_support: Option<ComplexMatrix>,
    pub right_support: Option<ComplexMatrix>,
}

impl HsElement {
    pub fn bare(matrix: ComplexMatrix) -> Self {
        Self { matrix, left_support: None, right_support: None }
    }

    pub fn hs_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    /// `||P_l A P_r - A||_F` for the attached supports (0 when none are attached).
    pub fn support_defect(&self) -> f64 {
        let mut m = self.matrix.clone();
        if let Some(p) = &self.left_support {
            m = p * &m;
        }
        if let Some(p) = &self.right_support {
            m = &m * p;
        }
        (&m - &self.matrix).frobenius_norm()
    }
}

/// `i_rho(x) = rho^{1/4} x rho^{1/4}`, supported on `supp(rho)` on both sides.
pub fn embed(rho: &DensityMatrix, x: &ComplexMatrix) -> Result<HsElement> {
    let n = rho.dim();
    if x.shape() != (n, n) {
        return Err(dim_mismatch(format!("embedding a {:?} observable into dim {n}", x.shape())));
    }
    let q = rho.real_power(0.25);
    let p = rho.support_projection();
    Ok(HsElement { matrix: (&(&q * x) * &q).hermitian_part(), left_support: Some(p.clone()), right_support: Some(p) })
}

/// `||Phi_*(sigma) - rho||_1`.
pub fn marginal_deviation(ch: &KrausChannel, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if ch.dim_in() != rho.dim() || ch.dim_out() != sigma.dim() {
        return Err(dim_mismatch(format!(
            "channel ({} <- {}) does not match states ({}, {})",
            ch.dim_in(),
            ch.dim_out(),
            rho.dim(),
            sigma.dim()
        )));
    }
    let pushed = ch.predual_apply(sigma.matrix())?;
    hermitian_trace_norm(&(&pushed - rho.matrix()))
}

/// Fails with `MarginalMismatch` unless `Phi_*(sigma) = rho` within `MARGINAL_TOL`.
pub fn check_marginal(ch: &KrausChannel, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let deviation = marginal_deviation(ch, rho, sigma)?;
    if !(deviation <= MARGINAL_TOL) {
        return Err(QotError::MarginalMismatch { deviation });
    }
    Ok(deviation)
}

/// Finite-dimensional `Phi^(2)`: `A -> sigma^{1/4} Phi(rho_+^{-1/4} A rho_+^{-1/4}) sigma^{1/4}`.
pub fn phi2_apply(ch: &KrausChannel, rho: &DensityMatrix, sigma: &DensityMatrix, a: &HsElement) -> Result<HsElement> {
    check_marginal(ch, rho, sigma)?;
    let n = rho.dim();
    if a.matrix.shape() != (n, n) {
        return Err(dim_mismatch(format!("element {:?} on dim {n}", a.matrix.shape())));
    }
    let p = rho.support_projection();
    let deviation = (&(&(&p * &a.matrix) * &p) - &a.matrix).frobenius_norm();
    if deviation > SUPPORT_TOL {
        return Err(QotError::SupportViolation { deviation });
    }
    let inv = rho.real_power(-0.25);
    let x = &(&inv * &a.matrix) * &inv;
    let q = sigma.real_power(0.25);
    let out = &(&q * &ch.heisenberg_apply(&x)?) * &q;
    let ps = sigma.support_projection();
    Ok(HsElement { matrix: out, left_support: Some(ps.clone()), right_support: Some(ps) })
}

/// Breakdown of the transport cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    /// Raw total, possibly slightly negative from roundoff.
    pub total: f64,
    pub per_operator: Vec<f64>,
    /// `<x_k, x_k>_rho`
    pub norm_x: Vec<f64>,
    /// `<y_k, y_k>_sigma`
    pub norm_y: Vec<f64>,
    /// `<Phi(x_k), y_k>_sigma`
    pub cross: Vec<f64>,
}

impl CostReport {
    /// Total read as a squared distance: tiny negatives clamp to zero.
    pub fn squared_distance(&self) -> f64 {
        if self.total < 0.0 && self.total >= -COST_FLOOR {
            0.0
        } else {
            self.total
        }
    }
}

/// Transport cost of `ch`; requires `Phi_*(sigma) = rho`.
pub fn cost(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    xs: &ObservableTuple,
    ys: &ObservableTuple,
) -> Result<CostReport> {
    check_marginal(ch, rho, sigma)?;
    cost_unchecked(ch, rho, sigma, xs, ys)
}

/// Cost without the marginal check (used to evaluate approximate solver output).
pub fn cost_unchecked(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    xs: &ObservableTuple,
    ys: &ObservableTuple,
) -> Result<CostReport> {
    if xs.len() != ys.len() {
        return Err(QotError::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.dim() != rho.dim() || ys.dim() != sigma.dim() {
        return Err(dim_mismatch("cost tuples do not match state dimensions"));
    }
    if ch.dim_in() != rho.dim() || ch.dim_out() != sigma.dim() {
        return Err(dim_mismatch("channel does not match state dimensions"));
    }
    let sr = rho.sqrt();
    let ss = sigma.sqrt();
    let mut report = CostReport {
        total: 0.0,
        per_operator: Vec::with_capacity(xs.len()),
        norm_x: Vec::with_capacity(xs.len()),
        norm_y: Vec::with_capacity(xs.len()),
        cross: Vec::with_capacity(xs.len()),
    };
    for (x, y) in xs.iter().zip(ys.iter()) {
        let nx = kms_inner_with_sqrt(x, x, &sr);
        let ny = kms_inner_with_sqrt(y, y, &ss);
        let cr = kms_inner_with_sqrt(&ch.heisenberg_apply(x)?, y, &ss);
        let c = nx + ny - 2.0 * cr;
        report.norm_x.push(nx);
        report.norm_y.push(ny);
        report.cross.push(cr);
        report.per_operator.push(c);
    }
    report.total = report.per_operator.iter().sum();
    Ok(report)
}

/// Affine form of the cost in the Choi variable:
/// `C(Phi) = constant + tr(objective^* J(Phi))`.
#[derive(Clone, Debug, PartialEq)]
pub struct CostForm {
    pub constant: f64,
    pub objective: ComplexMatrix,
}

/// `constant = sum_k <x_k,x_k>_rho + <y_k,y_k>_sigma`,
/// `objective = -2 sum_k x_k^T (x) sigma^{1/2} y_k sigma^{1/2}` (transpose in the
/// computational basis).
pub fn choi_cost_form(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    xs: &ObservableTuple,
    ys: &ObservableTuple,
) -> Result<CostForm> {
    if xs.len() != ys.len() {
        return Err(QotError::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.dim() != rho.dim() || ys.dim() != sigma.dim() {
        return Err(dim_mismatch("cost tuples do not match state dimensions"));
    }
    let (n, m) = (rho.dim(), sigma.dim());
    let sr = rho.sqrt();
    let ss = sigma.sqrt();
    let mut constant = 0.0;
    let mut objective = ComplexMatrix::zeros(n * m, n * m);
    for (x, y) in xs.iter().zip(ys.iter()) {
        constant += kms_inner_with_sqrt(x, x, &sr) + kms_inner_with_sqrt(y, y, &ss);
        let sys = &(&ss * y) * &ss;
        objective -= &x.transpose().kron(&sys).scale_real(2.0);
    }
    Ok(CostForm { constant, objective: objective.hermitian_part() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, pauli_z};
    use crate::quantum::{kraus_to_choi, replacer_channel};

    #[test]
    fn kms_on_maximally_mixed_qubit() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!((kms_inner(&pauli_z(), &pauli_z(), &rho).unwrap() - 1.0).abs() < 1e-15);
        assert!(kms_inner(&pauli_x(), &pauli_z(), &rho).unwrap().abs() < 1e-15);
    }

    #[test]
    fn kms_on_pure_state() {
        // tr(Z P Z P) = <0|Z|0>^2 = 1
        let rho = DensityMatrix::basis(2, 0).unwrap();
        assert!((kms_inner(&pauli_z(), &pauli_z(), &rho).unwrap() - 1.0).abs() < 1e-15);
        assert!(kms_inner(&pauli_x(), &pauli_x(), &rho).unwrap().abs() < 1e-15);
    }

    #[test]
    fn embedding_of_scalar_state() {
        let rho = DensityMatrix::maximally_mixed(4);
        let x = crate::quantum::random_observable(4, 3);
        let e = embed(&rho, &x).unwrap();
        assert!((&e.matrix - &x.scale_real(0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn embedding_annihilates_kernel() {
        let rho = DensityMatrix::basis(2, 0).unwrap();
        let e = embed(&rho, &pauli_x()).unwrap();
        assert!(e.matrix.max_abs() < 1e-15);
        assert!(e.support_defect() < 1e-15);
    }

    #[test]
    fn identity_channel_self_cost_is_zero() {
        let s = crate::quantum::random_state(3, 2, 4).unwrap();
        let xs = ObservableTuple::new(3, vec![crate::quantum::random_observable(3, 1)]).unwrap();
        let r = cost(&KrausChannel::identity(3), &s, &s, &xs, &xs).unwrap();
        assert!(r.total.abs() < 1e-14);
    }

    #[test]
    fn replacer_cost_on_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(2);
        let ch = replacer_channel(&rho, 2).unwrap();
        let zs = ObservableTuple::new(2, vec![pauli_z()]).unwrap();
        let r = cost(&ch, &rho, &rho, &zs, &zs).unwrap();
        assert!((r.total - 2.0).abs() < 1e-14);
        assert!(r.cross[0].abs() < 1e-15);
    }

    #[test]
    fn marginal_mismatch_reported() {
        let rho = DensityMatrix::basis(2, 0).unwrap();
        let sigma = DensityMatrix::basis(2, 1).unwrap();
        let zs = ObservableTuple::new(2, vec![pauli_z()]).unwrap();
        let err = cost(&KrausChannel::identity(2), &rho, &sigma, &zs, &zs).unwrap_err();
        match err {
            QotError::MarginalMismatch { deviation } => assert!((deviation - 2.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn length_mismatch() {
        let rho = DensityMatrix::maximally_mixed(2);
        let a = ObservableTuple::pauli();
        let b = a.truncated(2);
        assert!(matches!(cost(&KrausChannel::identity(2), &rho, &rho, &a, &b), Err(QotError::LengthMismatch { .. })));
    }

    #[test]
    fn cost_form_examples() {
        let rho = DensityMatrix::maximally_mixed(2);
        let empty = ObservableTuple::new(2, vec![]).unwrap();
        let f = choi_cost_form(&rho, &rho, &empty, &empty).unwrap();
        assert_eq!(f.constant, 0.0);
        assert_eq!(f.objective.max_abs(), 0.0);

        let zs = ObservableTuple::new(2, vec![pauli_z()]).unwrap();
        let f = choi_cost_form(&rho, &rho, &zs, &zs).unwrap();
        assert!((f.constant - 2.0).abs() < 1e-15);
        let expect = pauli_z().transpose().kron(&pauli_z()).scale_real(-1.0);
        assert!((&f.objective - &expect).max_abs() < 1e-15);

        let ch = replacer_channel(&rho, 2).unwrap();
        let j = kraus_to_choi(&ch);
        let lin = f.constant + hs_inner(&f.objective, j.matrix()).unwrap().re;
        assert!((lin - 2.0).abs() < 1e-14);
    }

    #[test]
    fn squared_distance_clamps_only_roundoff() {
        let mut r = CostReport { total: -1e-10, per_operator: vec![], norm_x: vec![], norm_y: vec![], cross: vec![] };
        assert_eq!(r.squared_distance(), 0.0);
        r.total = -1e-6;
        assert_eq!(r.squared_distance(), -1e-6);
    }
}
