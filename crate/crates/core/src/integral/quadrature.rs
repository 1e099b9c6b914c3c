//! Composite Gauss-Legendre rules for the probability measure
//! `dmu(t) = 2 / cosh(2 pi t) dt` on the real line.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};

pub const DEFAULT_TRUNCATION: f64 = 4.0;
pub const DEFAULT_PANELS: usize = 64;
pub const DEFAULT_ORDER: usize = 8;

/// Density of the measure.
pub fn sech_density(t: f64) -> f64 {
    2.0 / (2.0 * PI * t).cosh()
}

/// Nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature nodes `t_i` and weights `w_i` (density already folded in).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub truncation: f64,
    pub panels: usize,
    pub order: usize,
    /// Exact mass of `|t| > T`: `(4/pi) atan(exp(-2 pi T))`.
    pub tail_mass: f64,
    /// Upper bound `(4/pi) exp(-2 pi T)` on the tail mass.
    pub tail_bound: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_i w_i f(t_i)` in node order.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        build_quadrature(DEFAULT_TRUNCATION, DEFAULT_PANELS, DEFAULT_ORDER).expect("defaults are valid")
    }
}

/// `panels` equal Gauss-Legendre panels of `order` points on `[-T, T]`.
pub fn build_quadrature(truncation: f64, panels: usize, order: usize) -> Result<QuadratureRule> {
    if !(truncation > 0.0 && truncation.is_finite()) || panels == 0 || order < 2 {
        return Err(QotError::InvalidParameters(format!(
            "quadrature needs T > 0, panels >= 1, order >= 2 (got T = {truncation}, panels = {panels}, order = {order})"
        )));
    }
    let (xi, wi) = gauss_legendre(order);
    let h = 2.0 * truncation / panels as f64;
    let total = panels * order;
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for p in 0..panels {
        let left = -truncation + p as f64 * h;
        for (x, w) in xi.iter().zip(&wi) {
            let t = left + 0.5 * h * (x + 1.0);
            nodes.push(t);
            weights.push(0.5 * h * w * sech_density(t));
        }
    }
    // exact mirror symmetry about 0
    for i in 0..total / 2 {
        let j = total - 1 - i;
        nodes[j] = -nodes[i];
        weights[j] = weights[i];
    }
    if total % 2 == 1 {
        nodes[total / 2] = 0.0;
    }
    let decay = (-2.0 * PI * truncation).exp();
    Ok(QuadratureRule {
        nodes,
        weights,
        truncation,
        panels,
        order,
        tail_mass: 4.0 / PI * decay.atan(),
        tail_bound: 4.0 / PI * decay,
    })
}

/// Residue identity `f(0) = 1/2 int f(1/4 + it) + f(-1/4 + it) dmu(t)` for `f(z) = exp(a z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// With `f(z) = e^{a z}` the right side is `cosh(a/4) int cos(a t) dmu(t)`.
pub fn residue_selfcheck(a: f64, rule: &QuadratureRule) -> ResidueCheck {
    let lhs = 1.0;
    let rhs = (a / 4.0).cosh() * rule.integrate(|t| (a * t).cos());
    ResidueCheck { lhs, rhs, gap: (lhs - rhs).abs() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(8);
        // degree 14 monomial: int_{-1}^{1} t^14 = 2/15
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let (x3, _) = gauss_legendre(3);
        assert!((x3[2] - 0.6f64.sqrt()).abs() < 1e-15);
        assert_eq!(x3[1], 0.0);
    }

    #[test]
    fn rule_is_symmetric_probability() {
        let rule = QuadratureRule::default();
        assert_eq!(rule.len(), 512);
        assert!((rule.total_weight() - 1.0).abs() < 1e-9);
        assert!(rule.integrate(|t| t).abs() < 1e-15);
        for i in 0..rule.len() {
            assert_eq!(rule.nodes[i], -rule.nodes[rule.len() - 1 - i]);
            assert!(rule.weights[i] >= 0.0);
        }
        assert!(rule.tail_mass <= rule.tail_bound);
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_quadrature(0.0, 4, 8).is_err());
        assert!(build_quadrature(1.0, 0, 8).is_err());
        assert!(build_quadrature(1.0, 4, 1).is_err());
    }

    #[test]
    fn residue_constant_function() {
        let rule = QuadratureRule::default();
        assert!(residue_selfcheck(0.0, &rule).gap <= 1e-9);
    }
}
