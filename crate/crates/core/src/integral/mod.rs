//! Integral representation of the transport cost.
//!
//! For a marginal-consistent triple the cost of one pair `(x, y)` equals
//!
//! ```text
//! int || L_v(sigma^{1/4+it} y sigma^{1/4-it}) - R_v(rho^{1/4+it} x rho^{1/4-it}) ||_2^2 dmu(t)
//! ```
//!
//! with `dmu = 2 sech(2 pi t) dt`. This module evaluates both sides and the
//! subadditivity of the cost under composition.

mod operators;
mod quadrature;

pub use operators::{l_apply, lstar_apply, r_apply, OperatorTuple, RMap};
pub use quadrature::{
    build_quadrature, gauss_legendre, residue_selfcheck, sech_density, QuadratureRule, ResidueCheck, DEFAULT_ORDER,
    DEFAULT_PANELS, DEFAULT_TRUNCATION,
};

use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, Result};
use crate::kms::{check_marginal, cost, embed};
use crate::linalg::{ComplexMatrix, HermitianEig, C64, ZERO};
use crate::quantum::{compose, DensityMatrix, KrausChannel, ObservableTuple};

/// `rho^{s + it}` from a cached decomposition with the kernel mapped to zero.
fn complex_power(eig: &HermitianEig, support: &[f64], s: f64, t: f64) -> ComplexMatrix {
    let mut k = 0;
    eig.map_eigenvalues(|_| {
        let l = support[k];
        k += 1;
        if l > 0.0 {
            let ln = l.ln();
            C64::from_polar((s * ln).exp(), t * ln)
        } else {
            ZERO
        }
    })
}

/// Cached operators for repeated integrand evaluation on one triple.
pub struct IntegrandContext<'a> {
    ch: &'a KrausChannel,
    rho: &'a DensityMatrix,
    sigma: &'a DensityMatrix,
    rho_support: Vec<f64>,
    sigma_support: Vec<f64>,
    r: RMap,
}

impl<'a> IntegrandContext<'a> {
    pub fn new(ch: &'a KrausChannel, rho: &'a DensityMatrix, sigma: &'a DensityMatrix) -> Result<Self> {
        let r = RMap::new(ch, rho, sigma)?;
        Ok(Self {
            ch,
            rho,
            sigma,
            rho_support: rho.spectrum().support_eigenvalues(),
            sigma_support: sigma.spectrum().support_eigenvalues(),
            r,
        })
    }

    fn check(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> Result<()> {
        let (n, m) = (self.rho.dim(), self.sigma.dim());
        if x.shape() != (n, n) || y.shape() != (m, m) {
            return Err(dim_mismatch("integrand observables do not match the states"));
        }
        Ok(())
    }

    /// `|| L(sigma^{1/4+it} y sigma^{1/4-it}) - R(rho^{1/4+it} x rho^{1/4-it}) ||_2^2`
    pub fn eval(&self, t: f64, x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
        self.check(x, y)?;
        let ps = complex_power(self.sigma.spectrum().eig(), &self.sigma_support, 0.25, t);
        let pr = complex_power(self.rho.spectrum().eig(), &self.rho_support, 0.25, t);
        let ys = &(&ps * y) * &ps.adjoint();
        let xs = &(&pr * x) * &pr.adjoint();
        let left = l_apply(self.ch, &ys)?;
        let right = self.r.apply(&xs)?;
        Ok(left.dist_sq(&right))
    }

    /// Same quantity written through the embeddings:
    /// `|| L(sigma^{it} i_sigma(y) sigma^{-it}) - R(rho^{it} i_rho(x) rho^{-it}) ||_2^2`.
    pub fn eval_embedded(&self, t: f64, ix: &ComplexMatrix, iy: &ComplexMatrix) -> Result<f64> {
        self.check(ix, iy)?;
        let us = complex_power(self.sigma.spectrum().eig(), &self.sigma_support, 0.0, t);
        let ur = complex_power(self.rho.spectrum().eig(), &self.rho_support, 0.0, t);
        let ys = &(&us * iy) * &us.adjoint();
        let xs = &(&ur * ix) * &ur.adjoint();
        Ok(l_apply(self.ch, &ys)?.dist_sq(&self.r.apply(&xs)?))
    }
}

/// Integrand at a single `t`; requires `Phi_*(sigma) = rho`.
pub fn integrand(
    t: f64,
    ch: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
) -> Result<f64> {
    IntegrandContext::new(ch, rho, sigma)?.eval(t, x, y)
}

/// Cost versus its quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralCheck {
    /// Direct cost.
    pub lhs: f64,
    /// Quadrature of the integrand, summed over the tuple.
    pub rhs: f64,
    pub gap: f64,
    /// Quadrature of the embedded form.
    pub rhs_embedded: f64,
    /// `|rhs - rhs_embedded|`
    pub embedding_gap: f64,
}

pub fn verify_integral_rep(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    xs: &ObservableTuple,
    ys: &ObservableTuple,
    rule: &QuadratureRule,
) -> Result<IntegralCheck> {
    let lhs = cost(ch, rho, sigma, xs, ys)?.total;
    let ctx = IntegrandContext::new(ch, rho, sigma)?;
    let mut rhs = 0.0;
    let mut rhs_embedded = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        let ix = embed(rho, x)?.matrix;
        let iy = embed(sigma, y)?.matrix;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            rhs += w * ctx.eval(t, x, y)?;
            rhs_embedded += w * ctx.eval_embedded(t, &ix, &iy)?;
        }
    }
    Ok(IntegralCheck { lhs, rhs, gap: (lhs - rhs).abs(), rhs_embedded, embedding_gap: (rhs - rhs_embedded).abs() })
}

/// Costs along a two-step chain and the subadditivity slack
/// `sqrt(c12) + sqrt(c23) - sqrt(c13)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubadditivityCheck {
    pub c13: f64,
    pub c12: f64,
    pub c23: f64,
    pub slack: f64,
}

fn root(c: f64) -> f64 {
    c.max(0.0).sqrt()
}

/// `ch12` transports `rho2` to `rho1`, `ch23` transports `rho3` to `rho2`.
#[allow(clippy::too_many_arguments)]
pub fn verify_subadditivity(
    ch12: &KrausChannel,
    ch23: &KrausChannel,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    rho3: &DensityMatrix,
    xs1: &ObservableTuple,
    xs2: &ObservableTuple,
    xs3: &ObservableTuple,
) -> Result<SubadditivityCheck> {
    check_marginal(ch12, rho1, rho2)?;
    check_marginal(ch23, rho2, rho3)?;
    let ch13 = compose(ch12, ch23)?;
    let c12 = cost(ch12, rho1, rho2, xs1, xs2)?.squared_distance();
    let c23 = cost(ch23, rho2, rho3, xs2, xs3)?.squared_distance();
    let c13 = cost(&ch13, rho1, rho3, xs1, xs3)?.squared_distance();
    Ok(SubadditivityCheck { c13, c12, c23, slack: root(c12) + root(c23) - root(c13) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli_z;
    use crate::quantum::{random_observable, random_state, replacer_channel};

    #[test]
    fn identity_channel_integrand_vanishes() {
        let rho = random_state(3, 3, 11).unwrap();
        let x = random_observable(3, 12);
        let ch = KrausChannel::identity(3);
        for t in [-2.0, -0.3, 0.0, 0.4, 3.0] {
            assert!(integrand(t, &ch, &rho, &rho, &x, &x).unwrap() < 1e-24);
        }
    }

    #[test]
    fn replacer_instance_matches_hand_value() {
        let rho = DensityMatrix::maximally_mixed(2);
        let ch = replacer_channel(&rho, 2).unwrap();
        let zs = ObservableTuple::new(2, vec![pauli_z()]).unwrap();
        let rule = QuadratureRule::default();
        let r = verify_integral_rep(&ch, &rho, &rho, &zs, &zs, &rule).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-14);
        assert!(r.gap <= 1e-8, "gap {}", r.gap);
        assert!(r.embedding_gap <= 1e-10);
    }

    #[test]
    fn neutral_composition() {
        let rho1 = random_state(2, 2, 1).unwrap();
        let xs = ObservableTuple::new(2, vec![random_observable(2, 2)]).unwrap();
        let ch = replacer_channel(&rho1, 2).unwrap();
        let rho2 = DensityMatrix::maximally_mixed(2);
        let ys = ObservableTuple::new(2, vec![random_observable(2, 3)]).unwrap();
        let id = KrausChannel::identity(2);
        let r = verify_subadditivity(&ch, &id, &rho1, &rho2, &rho2, &xs, &ys, &ys).unwrap();
        assert!((r.c13 - r.c12).abs() < 1e-12);
        assert!(r.c23.abs() < 1e-12);
        assert!(r.slack.abs() < 1e-6);
    }
}
