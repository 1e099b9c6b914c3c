use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{dim_mismatch, QotError, Result};
use crate::kms::choi_cost_form;
use crate::linalg::{hs_inner, ComplexMatrix, C64, I, ONE};
use crate::quantum::{kraus_to_choi, replacer_channel, ChoiMatrix, DensityMatrix, ObservableTuple};

/// Real-linear constraint `tr(matrix J) = target` with Hermitian `matrix`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub matrix: ComplexMatrix,
    pub target: f64,
}

/// `minimise constant + tr(objective J)` over PSD `J` on `H (x) K` subject to
///
/// * unitality `Tr_H J = 1_K` (`dim_out^2` constraints), then
/// * marginal `Tr_K[J (1 (x) sigma)] = rho^T` (`dim_in^2` constraints),
///
/// each written against an orthonormal basis of Hermitian matrices.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub dim_in: usize,
    pub dim_out: usize,
    pub objective_constant: f64,
    pub objective: ComplexMatrix,
    pub constraints: Vec<Constraint>,
    pub psd: bool,
    /// Equivalent well-conditioned form the solver iterates on.
    pub coupling: CouplingForm,
    /// Choi matrix of the replacer channel; always feasible.
    pub warm_start: ChoiMatrix,
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
    pub xs: ObservableTuple,
    pub ys: ObservableTuple,
}

/// Orthonormal (Hilbert-Schmidt) basis of `d x d` Hermitian matrices:
/// `E_aa`, then `(E_ab + E_ba)/sqrt 2` and `i(E_ab - E_ba)/sqrt 2` for `a < b`.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for a in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(a, a)] = ONE;
        basis.push(e);
    }
    for a in 0..d {
        for b in (a + 1)..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(a, b)] = C64::new(FRAC_1_SQRT_2, 0.0);
            s[(b, a)] = C64::new(FRAC_1_SQRT_2, 0.0);
            basis.push(s);
            let mut t = ComplexMatrix::zeros(d, d);
            t[(a, b)] = I * FRAC_1_SQRT_2;
            t[(b, a)] = -I * FRAC_1_SQRT_2;
            basis.push(t);
        }
    }
    basis
}

/// Orthonormal eigenvectors of `rho` with nonzero eigenvalue (as columns,
/// conjugated when `transpose`), and those eigenvalues.
fn support_frame(rho: &DensityMatrix, transpose: bool) -> (ComplexMatrix, Vec<f64>) {
    let spectrum = rho.spectrum();
    let support = spectrum.support_eigenvalues();
    let vecs = &spectrum.eig().eigenvectors;
    let cols: Vec<usize> = (0..support.len()).filter(|&k| support[k] > 0.0).collect();
    let frame = ComplexMatrix::from_fn(rho.dim(), cols.len(), |r, c| {
        let v = vecs[(r, cols[c])];
        if transpose {
            v.conj()
        } else {
            v
        }
    });
    (frame, cols.iter().map(|&k| support[k]).collect())
}

/// The same program after the congruence `J = T K T^* + J_perp` with
/// `T = U (x) sigma^{-1/2} V`, where `U` spans `supp(rho^T)` and `V` spans
/// `supp(sigma)`:
///
/// `minimise tr(objective K)` over PSD `K` on `C^r (x) C^s` subject to
/// `Tr_1 K = diag(sigma on V)` (`s^2` constraints, first) and
/// `Tr_2 K = diag(rho^T on U)` (`r^2` constraints).
///
/// The objective vanishes on `J_perp = (1/n) 1 (x) (1 - P_sigma)`, which only
/// completes unitality off the support of `sigma`. `warm_start` is the
/// product of the two marginals and is positive definite.
#[derive(Clone, Debug)]
pub struct CouplingForm {
    pub rho_rank: usize,
    pub sigma_rank: usize,
    /// Nonzero eigenvalues of `rho`, in the order of `U`.
    pub rho_eigenvalues: Vec<f64>,
    pub transform: ComplexMatrix,
    /// Left inverse `U^* (x) V^* sigma^{1/2}` of `transform`.
    pub pullback: ComplexMatrix,
    pub completion: ComplexMatrix,
    pub objective: ComplexMatrix,
    pub constraints: Vec<Constraint>,
    pub warm_start: ComplexMatrix,
}

impl CouplingForm {
    fn new(rho: &DensityMatrix, sigma: &DensityMatrix, objective: &ComplexMatrix) -> Result<Self> {
        let (n, m) = (rho.dim(), sigma.dim());
        let (u, lr) = support_frame(rho, true);
        let (v, ls) = support_frame(sigma, false);
        let (r, s) = (lr.len(), ls.len());
        let transform = u.kron(&(&sigma.real_power(-0.5) * &v));
        let pullback = u.adjoint().kron(&(&v.adjoint() * &sigma.sqrt()));
        let p_perp = &ComplexMatrix::identity(m) - &(&v * &v.adjoint());
        let completion = ComplexMatrix::identity(n).kron(&p_perp).scale_real(1.0 / n as f64);
        let objective = (&(&transform.adjoint() * objective) * &transform).hermitian_part();

        let mut constraints = Vec::with_capacity(r * r + s * s);
        for e in hermitian_basis(s) {
            let target = (0..s).map(|k| e[(k, k)].re * ls[k]).sum();
            constraints.push(Constraint { matrix: ComplexMatrix::identity(r).kron(&e), target });
        }
        for f in hermitian_basis(r) {
            let target = (0..r).map(|k| f[(k, k)].re * lr[k]).sum();
            constraints.push(Constraint { matrix: f.kron(&ComplexMatrix::identity(s)), target });
        }
        let warm_start = ComplexMatrix::diag_real(&lr).kron(&ComplexMatrix::diag_real(&ls));
        Ok(Self {
            rho_rank: r,
            sigma_rank: s,
            rho_eigenvalues: lr,
            transform,
            pullback,
            completion,
            objective,
            constraints,
            warm_start,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho_rank * self.sigma_rank
    }

    /// Choi matrix `T K T^* + J_perp`.
    pub fn lift(&self, k: &ComplexMatrix) -> ComplexMatrix {
        let t = &self.transform;
        (&(&(t * k) * &t.adjoint()) + &self.completion).hermitian_part()
    }

    /// Coupling variable `K` of a Choi matrix; inverse of [`Self::lift`] on
    /// the feasible set.
    pub fn pull_back(&self, j: &ComplexMatrix) -> ComplexMatrix {
        let p = &self.pullback;
        (&(p * j) * &p.adjoint()).hermitian_part()
    }
}

pub fn build_sdp(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    xs: &ObservableTuple,
    ys: &ObservableTuple,
) -> Result<SdpProblem> {
    let (n, m) = (rho.dim(), sigma.dim());
    if xs.dim() != n || ys.dim() != m {
        return Err(dim_mismatch("cost tuples do not match the states"));
    }
    let form = choi_cost_form(rho, sigma, xs, ys)?;
    let id_in = ComplexMatrix::identity(n);
    let rho_t = rho.matrix().transpose();

    let mut constraints = Vec::with_capacity(n * n + m * m);
    for e in hermitian_basis(m) {
        let target = e.trace().re;
        constraints.push(Constraint { matrix: id_in.kron(&e), target });
    }
    for f in hermitian_basis(n) {
        let target = hs_inner(&f, &rho_t)?.re;
        constraints.push(Constraint { matrix: f.kron(sigma.matrix()), target });
    }

    let warm_start = kraus_to_choi(&replacer_channel(rho, m)?);
    let coupling = CouplingForm::new(rho, sigma, &form.objective)?;
    Ok(SdpProblem {
        dim_in: n,
        dim_out: m,
        objective_constant: form.constant,
        objective: form.objective,
        constraints,
        psd: true,
        coupling,
        warm_start,
        rho: rho.clone(),
        sigma: sigma.clone(),
        xs: xs.clone(),
        ys: ys.clone(),
    })
}

impl SdpProblem {
    pub fn choi_dim(&self) -> usize {
        self.dim_in * self.dim_out
    }

    /// `constant + tr(objective J)`.
    pub fn objective_value(&self, j: &ComplexMatrix) -> Result<f64> {
        Ok(self.objective_constant + hs_inner(&self.objective, j)?.re)
    }

    /// `tr(G_i J) - b_i` for every constraint.
    pub fn constraint_violations(&self, j: &ComplexMatrix) -> Result<Vec<f64>> {
        if j.shape() != (self.choi_dim(), self.choi_dim()) {
            return Err(QotError::DimensionMismatch("Choi variable has the wrong size".into()));
        }
        self.constraints.iter().map(|c| Ok(hs_inner(&c.matrix, j)?.re - c.target)).collect()
    }
}
