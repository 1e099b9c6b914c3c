//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use qot_core::linalg::{ComplexMatrix, C64};
use qot_core::quantum::{
    derive_seed, random_channel, random_observable, replacer_channel, DensityMatrix, KrausChannel, ObservableTuple,
};

/// `2 / cosh(2 pi t)`, written out independently of the library.
pub fn sech_weight(t: f64) -> f64 {
    2.0 / (2.0 * std::f64::consts::PI * t).cosh()
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `int g(t) 2 sech(2 pi t) dt` over the real line; the tail beyond
/// `|t| = 12` is below `1e-32`.
pub fn sech_integral(g: impl Fn(f64) -> f64) -> f64 {
    let f = |t: f64| g(t) * sech_weight(t);
    // split at 0 so the symmetric peak is resolved on both sides
    adaptive_simpson(&f, -12.0, 0.0, 1e-14) + adaptive_simpson(&f, 0.0, 12.0, 1e-14)
}

/// `sum_k (<x_k>_rho - <x_k>_sigma)^2` from plain traces.
pub fn pure_pure_cost(rho: &DensityMatrix, sigma: &DensityMatrix, xs: &ObservableTuple) -> f64 {
    xs.iter()
        .map(|x| {
            let er = (rho.matrix() * x).trace().re;
            let es = (sigma.matrix() * x).trace().re;
            (er - es).powi(2)
        })
        .sum()
}

/// Unit vector spanning a pure state.
pub fn pure_vector(state: &DensityMatrix) -> Vec<C64> {
    let eig = state.spectrum().eig();
    let k = (0..eig.dim()).max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])).unwrap();
    eig.eigenvectors.column(k)
}

/// A feasible channel for pure `rho = |psi><psi|` and pure `sigma = |phi><phi|`
/// that differs from the replacer: `v_0 = |psi><phi|` plus the Kraus
/// operators `w_j` of a seeded channel restricted to `phi`'s complement,
/// `w_j (1 - |phi><phi|)`.
pub fn second_pure_channel(rho: &DensityMatrix, sigma: &DensityMatrix, seed: u64) -> KrausChannel {
    let (n, m) = (rho.dim(), sigma.dim());
    let psi = pure_vector(rho);
    let phi = pure_vector(sigma);
    let v1 = ComplexMatrix::from_fn(n, m, |a, b| psi[a] * phi[b].conj());
    let iso = random_channel(n, m, m, derive_seed(seed, 3)).unwrap();
    let proj = &ComplexMatrix::identity(m) - &ComplexMatrix::from_fn(m, m, |a, b| phi[a] * phi[b].conj());
    let mut kraus = vec![v1];
    kraus.extend(iso.kraus().iter().map(|w| w * &proj));
    KrausChannel::new(kraus).unwrap()
}

/// Unitary diagonal in the eigenbasis of `state`, so it commutes with it.
fn commuting_unitary(state: &DensityMatrix, seed: u64) -> ComplexMatrix {
    let eig = state.spectrum().eig();
    let angles = random_observable(state.dim(), seed);
    let phases: Vec<C64> =
        (0..state.dim()).map(|a| C64::from_polar(1.0, std::f64::consts::PI * angles[(a, a)].re)).collect();
    let v = &eig.eigenvectors;
    let n = state.dim();
    let d = ComplexMatrix::from_fn(n, n, |a, b| if a == b { phases[a] } else { C64::new(0.0, 0.0) });
    &(v * &d) * &v.adjoint()
}

/// Another channel transporting `sigma` onto `rho`: `base` conjugated by
/// unitaries commuting with `rho` and `sigma`, mixed with the replacer.
pub fn random_feasible_channel(
    base: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    seed: u64,
) -> KrausChannel {
    let w = commuting_unitary(rho, derive_seed(seed, 0));
    let u = commuting_unitary(sigma, derive_seed(seed, 1));
    let t = (seed % 7) as f64 / 7.0 + 0.05;
    let mut kraus: Vec<ComplexMatrix> = base.kraus().iter().map(|v| (&(&w * v) * &u).scale_real(t.sqrt())).collect();
    let replacer = replacer_channel(rho, sigma.dim()).unwrap();
    kraus.extend(replacer.kraus().iter().map(|r| r.scale_real((1.0 - t).sqrt())));
    KrausChannel::new(kraus).unwrap()
}

/// `(a - b)` in Frobenius norm.
pub fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).frobenius_norm()
}
