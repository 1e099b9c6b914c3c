//! Operator splitting for `min <c, z>` over `{A z = b} ∩ PSD`.
//!
//! Iteration (scaled form, step `tau`, relaxation `alpha`):
//!
//! ```text
//! x  = Proj_affine(z - u - tau c)
//! xr = alpha x + (1 - alpha) z
//! z  = Proj_psd(xr + u)
//! u  = u + xr - z
//! ```
//!
//! The dual slack is `S = -u / tau` (PSD and complementary to `z` after every
//! step); the dual multiplier `y` is the least-squares solution of
//! `A^T y = c + u / tau`, and the residual of that system is the dual residual.
//!
//! The iteration runs on the coupling form of the problem, where both
//! constraint families are partial traces and the warm start is strictly
//! feasible.

use serde::{Deserialize, Serialize};

use super::anderson::Anderson;
use super::problem::SdpProblem;
use crate::error::{QotError, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::quantum::ChoiMatrix;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Real isometric coordinates of a Hermitian matrix: the diagonal, then
/// `sqrt 2 Re`, `sqrt 2 Im` of each upper-triangular entry.
pub fn hvec(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        v.push(m[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            v.push(SQRT_2 * m[(i, j)].re);
            v.push(SQRT_2 * m[(i, j)].im);
        }
    }
    v
}

pub fn unhvec(v: &[f64], n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(v[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = C64::new(v[k], v[k + 1]) / SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Step `tau` of the affine update.
    pub step: f64,
    pub max_iter: usize,
    pub tol_primal: f64,
    pub tol_dual: f64,
    pub tol_gap: f64,
    pub over_relaxation: f64,
    /// Rebalance `tau` when the primal and dual residuals drift apart.
    pub adaptive_step: bool,
    /// Anderson acceleration memory; 0 runs plain iterations.
    pub anderson_memory: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            step: 1.0,
            max_iter: 50_000,
            tol_primal: 1e-8,
            tol_dual: 1e-8,
            tol_gap: 1e-6,
            over_relaxation: 1.6,
            adaptive_step: true,
            anderson_memory: 10,
        }
    }
}

impl SolverParams {
    fn validate(&self) -> Result<()> {
        let ok = self.step > 0.0
            && self.step.is_finite()
            && self.tol_primal > 0.0
            && self.tol_dual > 0.0
            && self.tol_gap > 0.0
            && self.over_relaxation > 0.0
            && self.over_relaxation < 2.0;
        if ok {
            Ok(())
        } else {
            Err(QotError::InvalidParameters(format!("invalid solver parameters {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverStatus {
    Optimal,
    MaxIterations,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub choi: ChoiMatrix,
    /// Raw objective value at `choi`.
    pub optimal_cost: f64,
    /// `sqrt(max(0, optimal_cost))`
    pub divergence: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Primal minus dual objective.
    pub duality_gap: f64,
    pub iterations: usize,
    pub status: SolverStatus,
    /// Multipliers of the coupling-form constraints, in order.
    pub dual: Vec<f64>,
}

/// Dense real row-major matrix, only what the affine projection needs.
struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Dense {
    fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }
}

/// Precomputed least-squares machinery for `A z = b`.
struct AffineMap {
    a: Dense,
    /// `A^T (A A^T)^+`, shape `cols x rows`.
    pinv: Dense,
    b: Vec<f64>,
}

impl AffineMap {
    fn new(rows_of_a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        let rows = rows_of_a.len();
        let cols = rows_of_a.first().map_or(0, Vec::len);
        let a = Dense { rows, cols, data: rows_of_a.concat() };

        let gram = ComplexMatrix::from_fn(rows, rows, |i, j| {
            let ri = &a.data[i * cols..(i + 1) * cols];
            let rj = &a.data[j * cols..(j + 1) * cols];
            C64::new(dot(ri, rj), 0.0)
        });
        let eig = hermitian_eig(&gram)?;
        let cutoff = 1e-10 * eig.max_eigenvalue();
        let gram_pinv = eig.map_eigenvalues(|l| if l > cutoff { C64::new(1.0 / l, 0.0) } else { C64::new(0.0, 0.0) });
        let mut pinv = vec![0.0; cols * rows];
        for c in 0..cols {
            for r in 0..rows {
                pinv[c * rows + r] = (0..rows).map(|k| a.data[k * cols + c] * gram_pinv[(k, r)].re).sum();
            }
        }
        Ok(Self { a, pinv: Dense { rows: cols, cols: rows, data: pinv }, b })
    }

    /// Orthogonal projection of `v` onto `{A z = b}`, in place.
    fn project(&self, v: &mut [f64], scratch: &mut [f64], corr: &mut [f64]) {
        self.a.mul_vec(v, scratch);
        for (s, b) in scratch.iter_mut().zip(&self.b) {
            *s -= b;
        }
        self.pinv.mul_vec(scratch, corr);
        for (x, c) in v.iter_mut().zip(corr.iter()) {
            *x -= c;
        }
    }

    /// Least-squares `y` with `A^T y ≈ w`, and `||w - A^T y||`.
    fn dual_fit(&self, w: &[f64]) -> (Vec<f64>, f64) {
        let (rows, cols) = (self.a.rows, self.a.cols);
        // y = (A A^T)^+ A w = pinv^T w
        let mut y = vec![0.0; rows];
        for (c, wc) in w.iter().enumerate() {
            let prow = &self.pinv.data[c * rows..(c + 1) * rows];
            for (yr, p) in y.iter_mut().zip(prow) {
                *yr += p * wc;
            }
        }
        let mut res = w.to_vec();
        for (r, yr) in y.iter().enumerate() {
            let row = &self.a.data[r * cols..(r + 1) * cols];
            for (x, a) in res.iter_mut().zip(row) {
                *x -= a * yr;
            }
        }
        (y, norm(&res))
    }

    fn residual(&self, z: &[f64]) -> f64 {
        let mut s = vec![0.0; self.a.rows];
        self.a.mul_vec(z, &mut s);
        s.iter().zip(&self.b).map(|(x, b)| (x - b).powi(2)).sum::<f64>().sqrt()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_psd(v: &[f64], n: usize) -> Result<Vec<f64>> {
    let m = unhvec(v, n);
    let eig = hermitian_eig(&m)?;
    if eig.min_eigenvalue() >= 0.0 {
        return Ok(v.to_vec());
    }
    Ok(hvec(&eig.map_eigenvalues(|l| C64::new(l.max(0.0), 0.0))))
}

/// Real-coordinate data of the coupling form.
struct Reduced {
    dim: usize,
    c: Vec<f64>,
    affine: AffineMap,
    warm: ComplexMatrix,
    /// `rho` eigenvalue of each coupling-form basis index.
    rho_weight: Vec<f64>,
}

impl Reduced {
    fn new(problem: &SdpProblem) -> Result<Self> {
        let cf = &problem.coupling;
        let rows = cf.constraints.iter().map(|g| hvec(&g.matrix)).collect();
        let b = cf.constraints.iter().map(|g| g.target).collect();
        Ok(Self {
            dim: cf.dim(),
            c: hvec(&cf.objective),
            affine: AffineMap::new(rows, b)?,
            warm: cf.warm_start.clone(),
            rho_weight: (0..cf.dim()).map(|i| cf.rho_eigenvalues[i / cf.sigma_rank]).collect(),
        })
    }

    /// Feasible point near the PSD iterate `z`: project onto the affine set,
    /// then mix in the warm start `W` with the smallest weight that leaves
    /// no eigenvalue of the lifted Choi matrix below `-slack`.
    ///
    /// With `W = L (x) S` that weight is `-lambda_min` of
    /// `W^{-1/2} x W^{-1/2} + slack (L^{-1} (x) 1)`.
    fn restore_feasibility(&self, z: &[f64], slack: f64) -> Result<Vec<f64>> {
        let mut x = z.to_vec();
        let mut scratch = vec![0.0; self.affine.a.rows];
        let mut corr = vec![0.0; x.len()];
        self.affine.project(&mut x, &mut scratch, &mut corr);
        let xm = unhvec(&x, self.dim);
        let scale: Vec<f64> = (0..self.dim).map(|i| 1.0 / self.warm[(i, i)].re.sqrt()).collect();
        let mut whitened = ComplexMatrix::from_fn(self.dim, self.dim, |i, j| xm[(i, j)] * scale[i] * scale[j]);
        for (i, w) in self.rho_weight.iter().enumerate() {
            whitened[(i, i)] += C64::new(slack / w, 0.0);
        }
        let theta = -hermitian_eig(&whitened)?.min_eigenvalue();
        if theta <= 0.0 {
            return Ok(x);
        }
        let w = hvec(&self.warm);
        Ok(x.iter().zip(&w).map(|(a, b)| (a + theta * b) / (1.0 + theta)).collect())
    }
}

/// Negative eigenvalue allowed in the restored Choi matrix when exact
/// restoration moves the objective too far; well inside the certificate's
/// positivity tolerance.
const PSD_SLACK: f64 = 1e-10;

/// Residual ratio that triggers a step change, and the change factor.
const BALANCE_RATIO: f64 = 10.0;
const BALANCE_FACTOR: f64 = 2.0;
const BALANCE_EVERY: usize = 50;

/// Largest objective shift, as a fraction of `tol_gap`, that restoring
/// feasibility may cause at an accepted iterate.
const RESTORE_SHIFT: f64 = 0.1;

pub fn solve(problem: &SdpProblem, params: &SolverParams) -> Result<SdpSolution> {
    params.validate()?;
    let red = Reduced::new(problem)?;
    let (affine, c, n) = (&red.affine, &red.c, red.dim);
    let dim = c.len();
    let alpha = params.over_relaxation;
    let mut tau = params.step;

    // state (z, u), concatenated
    let mut state = hvec(&red.warm);
    state.resize(2 * dim, 0.0);
    let blowup = 1e6 * (1.0 + norm(&state));
    let mut x = vec![0.0; dim];
    let mut scratch = vec![0.0; affine.a.rows];
    let mut corr = vec![0.0; dim];
    let mut accel = Anderson::new(params.anderson_memory);
    // image and residual norm of the last point that was not extrapolated
    let mut fallback: Option<(Vec<f64>, f64)> = None;

    let mut status = SolverStatus::MaxIterations;
    let mut iterations = 0;
    let mut primal_residual = f64::INFINITY;
    let mut dual_residual = f64::INFINITY;
    let mut gap = f64::INFINITY;
    let mut dual = vec![0.0; affine.a.rows];
    let mut z = state[..dim].to_vec();
    let mut accepted = None;

    for it in 1..=params.max_iter {
        iterations = it;
        let (zs, us) = state.split_at(dim);
        for i in 0..dim {
            x[i] = zs[i] - us[i] - tau * c[i];
        }
        affine.project(&mut x, &mut scratch, &mut corr);
        let mut image = vec![0.0; 2 * dim];
        for i in 0..dim {
            let xr = alpha * x[i] + (1.0 - alpha) * zs[i];
            corr[i] = xr + us[i];
            image[dim + i] = xr;
        }
        z = project_psd(&corr, n)?;
        for i in 0..dim {
            image[dim + i] += us[i] - z[i];
        }
        image[..dim].copy_from_slice(&z);
        let u = &image[dim..];

        let step_norm = state.iter().zip(&image).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if let Some((plain, plain_norm)) = fallback.take() {
            if !(step_norm <= plain_norm) {
                // the extrapolated point made less progress than a plain step
                accel.reset();
                state = plain;
                z = state[..dim].to_vec();
                continue;
            }
        }
        if !step_norm.is_finite() || norm(&z) > blowup {
            return Err(QotError::NumericalFailure(format!("iterates diverged at iteration {it}")));
        }

        let mismatch = x.iter().zip(&z).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        primal_residual = mismatch.max(affine.residual(&z));
        let w: Vec<f64> = c.iter().zip(u).map(|(ci, ui)| ci + ui / tau).collect();
        let (y, rd) = affine.dual_fit(&w);
        dual_residual = rd;
        let dual_value = dot(&affine.b, &y);
        gap = dot(c, &z) - dual_value;
        dual = y;
        if primal_residual <= params.tol_primal && dual_residual <= params.tol_dual && gap.abs() <= params.tol_gap {
            // the reported point is the restored one; its gap must pass too
            for slack in [0.0, PSD_SLACK] {
                let restored = red.restore_feasibility(&z, slack)?;
                let restored_gap = dot(c, &restored) - dual_value;
                let shift = (restored_gap - gap).abs();
                if restored_gap.abs() <= params.tol_gap && shift <= RESTORE_SHIFT * params.tol_gap {
                    gap = restored_gap;
                    status = SolverStatus::Optimal;
                    accepted = Some(restored);
                    break;
                }
            }
            if accepted.is_some() {
                break;
            }
        }

        if params.adaptive_step && it % BALANCE_EVERY == 0 {
            let scale = if primal_residual > BALANCE_RATIO * dual_residual {
                1.0 / BALANCE_FACTOR
            } else if dual_residual > BALANCE_RATIO * primal_residual {
                BALANCE_FACTOR
            } else {
                1.0
            };
            if scale != 1.0 {
                tau *= scale;
                image[dim..].iter_mut().for_each(|v| *v *= scale);
                accel.reset();
                state = image;
                continue;
            }
        }

        if params.anderson_memory == 0 {
            state = image;
        } else {
            let next = accel.extrapolate(&state, &image)?;
            fallback = Some((image, step_norm));
            state = next;
        }
    }

    let point = match accepted {
        Some(p) => p,
        None => red.restore_feasibility(&z, 0.0)?,
    };
    let j = problem.coupling.lift(&unhvec(&point, n));
    let optimal_cost = problem.objective_value(&j)?;
    Ok(SdpSolution {
        choi: ChoiMatrix::unchecked(problem.dim_in, problem.dim_out, j),
        optimal_cost,
        divergence: optimal_cost.max(0.0).sqrt(),
        primal_residual,
        dual_residual,
        duality_gap: gap,
        iterations,
        status,
        dual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random_observable;

    #[test]
    fn hvec_is_isometric() {
        let a = random_observable(4, 1);
        let b = random_observable(4, 2);
        let ip = crate::linalg::hs_inner(&a, &b).unwrap().re;
        assert!((dot(&hvec(&a), &hvec(&b)) - ip).abs() < 1e-13);
        assert!((&unhvec(&hvec(&a), 4) - &a).max_abs() < 1e-15);
    }

    #[test]
    fn params_are_validated() {
        let p = SolverParams { over_relaxation: 2.5, ..SolverParams::default() };
        assert!(p.validate().is_err());
    }
}
