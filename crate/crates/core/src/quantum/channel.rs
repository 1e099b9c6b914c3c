//! Heisenberg-picture channels in Kraus form and their Choi matrices.
//!
//! A channel `Phi: B(H) -> B(K)` is stored as Kraus operators `v_j: K -> H`
//! (shape `dim_in x dim_out`, with `dim_in = dim H`, `dim_out = dim K`):
//!
//! ```text
//! Phi(x)      = sum_j v_j^* x v_j        (observables on H -> observables on K)
//! Phi_*(tau)  = sum_j v_j tau v_j^*      (states on K -> states on H)
//! ```
//!
//! The Choi matrix lives on `H (x) K` with `J = sum_ab E_ab (x) Phi(E_ab)`, i.e.
//! `J[(a, b'), (b, c')] = sum_j conj(v_j[a, b']) v_j[b, c']`.

use super::DensityMatrix;
use crate::error::{dim_mismatch, QotError, Result};
use crate::linalg::{hermitian_eig, partial_trace, ComplexMatrix, Factor, C64, DEFAULT_KERNEL_CUTOFF};
use crate::tolerances::{CHOI_TOL, RECOVERED_UNITALITY_TOL, UNITALITY_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

fn unitality_residual_of(kraus: &[ComplexMatrix], dim_out: usize) -> f64 {
    let mut acc = ComplexMatrix::zeros(dim_out, dim_out);
    for v in kraus {
        acc += &(&v.adjoint() * v);
    }
    (&acc - &ComplexMatrix::identity(dim_out)).frobenius_norm()
}

fn check_shapes(kraus: &[ComplexMatrix]) -> Result<(usize, usize)> {
    let first = kraus.first().ok_or_else(|| QotError::InvalidParameters("empty Kraus family".into()))?;
    let shape = first.shape();
    if shape.0 == 0 || shape.1 == 0 {
        return Err(dim_mismatch("Kraus operators must be non-empty"));
    }
    if let Some(bad) = kraus.iter().find(|v| v.shape() != shape) {
        return Err(dim_mismatch(format!("Kraus shapes {shape:?} and {:?} differ", bad.shape())));
    }
    Ok(shape)
}

impl KrausChannel {
    /// Validates `sum_j v_j^* v_j = 1` within `UNITALITY_TOL`.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(kraus, UNITALITY_TOL)
    }

    pub(crate) fn with_tolerance(kraus: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let (dim_in, dim_out) = check_shapes(&kraus)?;
        let residual = unitality_residual_of(&kraus, dim_out);
        if !(residual <= tol) {
            return Err(QotError::BrokenUnitality { residual });
        }
        Ok(Self { dim_in, dim_out, kraus })
    }

    /// No unitality check; used for approximate families recovered from
    /// solver output, where the residual is reported separately.
    pub(crate) fn unchecked(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let (dim_in, dim_out) = check_shapes(&kraus)?;
        Ok(Self { dim_in, dim_out, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim_in: dim, dim_out: dim, kraus: vec![ComplexMatrix::identity(dim)] }
    }

    /// Single-Kraus channel `Phi(x) = U^* x U`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn unitality_residual(&self) -> f64 {
        unitality_residual_of(&self.kraus, self.dim_out)
    }

    /// `Phi(x) = sum_j v_j^* x v_j`.
    pub fn heisenberg_apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(dim_mismatch(format!(
                "observable {:?} on a channel with input dimension {}",
                x.shape(),
                self.dim_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for v in &self.kraus {
            out += &(&(&v.adjoint() * x) * v);
        }
        Ok(out)
    }

    /// `Phi_*(tau) = sum_j v_j tau v_j^*`.
    pub fn predual_apply(&self, tau: &ComplexMatrix) -> Result<ComplexMatrix> {
        if tau.shape() != (self.dim_out, self.dim_out) {
            return Err(dim_mismatch(format!(
                "state {:?} on a channel with output dimension {}",
                tau.shape(),
                self.dim_out
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for v in &self.kraus {
            out += &(&(v * tau) * &v.adjoint());
        }
        Ok(out)
    }

    /// `Phi_*(sigma)` as a validated state.
    pub fn push_forward(&self, sigma: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.predual_apply(sigma.matrix())?)
    }
}

/// Kraus family `(v_i w_j)` of `Phi_23 . Phi_12`, flattened with `i` major.
///
/// `ch12` has Kraus operators `H2 -> H1`, `ch23` has `H3 -> H2`.
pub fn compose(ch12: &KrausChannel, ch23: &KrausChannel) -> Result<KrausChannel> {
    if ch12.dim_out != ch23.dim_in {
        return Err(dim_mismatch(format!(
            "cannot compose: first channel lands on dim {}, second acts on dim {}",
            ch12.dim_out, ch23.dim_in
        )));
    }
    let mut kraus = Vec::with_capacity(ch12.num_kraus() * ch23.num_kraus());
    for v in &ch12.kraus {
        for w in &ch23.kraus {
            kraus.push(v * w);
        }
    }
    let residual = unitality_residual_of(&kraus, ch23.dim_out);
    if residual > UNITALITY_TOL {
        return Err(QotError::BrokenUnitality { residual });
    }
    Ok(KrausChannel { dim_in: ch12.dim_in, dim_out: ch23.dim_out, kraus })
}

/// Replacer channel `Phi(x) = tr(rho x) 1` with Kraus operators
/// `sqrt(lambda_a) |e_a><f_b|` over the support of `rho` and the standard basis of `K`.
pub fn replacer_channel(rho: &DensityMatrix, dim_out: usize) -> Result<KrausChannel> {
    if dim_out == 0 {
        return Err(QotError::InvalidParameters("output dimension must be positive".into()));
    }
    let eig = rho.spectrum().eig();
    let lambdas = rho.spectrum().support_eigenvalues();
    let n = rho.dim();
    let mut kraus = Vec::new();
    for (alpha, &l) in lambdas.iter().enumerate() {
        if l <= 0.0 {
            continue;
        }
        let e = eig.eigenvectors.column(alpha);
        for beta in 0..dim_out {
            kraus.push(ComplexMatrix::from_fn(n, dim_out, |a, b| {
                if b == beta {
                    e[a] * l.sqrt()
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
        }
    }
    KrausChannel::new(kraus)
}

/// PSD matrix on `H (x) K` whose partial trace over `H` is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        let n = dim_in * dim_out;
        if matrix.shape() != (n, n) {
            return Err(dim_mismatch(format!("Choi matrix {:?} for dims ({dim_in}, {dim_out})", matrix.shape())));
        }
        if matrix.hermitian_defect() > CHOI_TOL {
            return Err(QotError::NonHermitianInput { asymmetry: matrix.hermitian_defect(), tolerance: CHOI_TOL });
        }
        let matrix = matrix.hermitian_part();
        let lmin = hermitian_eig(&matrix)?.min_eigenvalue();
        if lmin < -CHOI_TOL {
            return Err(QotError::NotPsd { eigenvalue: lmin });
        }
        let marg = partial_trace(&matrix, (dim_in, dim_out), Factor::First)?;
        let residual = (&marg - &ComplexMatrix::identity(dim_out)).frobenius_norm();
        if residual > CHOI_TOL {
            return Err(QotError::BrokenUnitality { residual });
        }
        Ok(Self { dim_in, dim_out, matrix })
    }

    pub(crate) fn unchecked(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Self {
        Self { dim_in, dim_out, matrix }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// `J = sum_j w_j w_j^*` with `w_j[(a, b)] = conj(v_j[a, b])`.
pub fn kraus_to_choi(ch: &KrausChannel) -> ChoiMatrix {
    let (n, m) = (ch.dim_in, ch.dim_out);
    let size = n * m;
    let mut j = ComplexMatrix::zeros(size, size);
    for v in &ch.kraus {
        let w: Vec<C64> = v.as_slice().iter().map(|z| z.conj()).collect();
        for p in 0..size {
            if w[p] == C64::new(0.0, 0.0) {
                continue;
            }
            for q in 0..size {
                j[(p, q)] += w[p] * w[q].conj();
            }
        }
    }
    ChoiMatrix { dim_in: n, dim_out: m, matrix: j }
}

/// Kraus operators from the eigenvectors of a Hermitian matrix on `H (x) K`,
/// keeping eigenvalues above `rank_cutoff * lambda_max`. Negative eigenvalues
/// are dropped.
pub(crate) fn kraus_from_choi_matrix(
    j: &ComplexMatrix,
    dim_in: usize,
    dim_out: usize,
    rank_cutoff: f64,
) -> Result<Vec<ComplexMatrix>> {
    let eig = hermitian_eig(&j.hermitian_part())?;
    let lmax = eig.max_eigenvalue();
    let mut kraus = Vec::new();
    for (k, &l) in eig.eigenvalues.iter().enumerate().rev() {
        if l <= rank_cutoff * lmax || l <= 0.0 {
            continue;
        }
        let s = l.sqrt();
        let data = (0..dim_in * dim_out).map(|p| (eig.eigenvectors[(p, k)] * s).conj()).collect();
        kraus.push(ComplexMatrix::from_vec(dim_in, dim_out, data)?);
    }
    if kraus.is_empty() {
        return Err(QotError::NotPsd { eigenvalue: eig.min_eigenvalue() });
    }
    Ok(kraus)
}

/// Inverse of [`kraus_to_choi`] via eigendecomposition.
pub fn choi_to_kraus(j: &ChoiMatrix, rank_cutoff: f64) -> Result<KrausChannel> {
    let lmin = hermitian_eig(&j.matrix)?.min_eigenvalue();
    if lmin < -CHOI_TOL {
        return Err(QotError::NotPsd { eigenvalue: lmin });
    }
    let kraus = kraus_from_choi_matrix(&j.matrix, j.dim_in, j.dim_out, rank_cutoff)?;
    KrausChannel::with_tolerance(kraus, RECOVERED_UNITALITY_TOL)
}

/// [`choi_to_kraus`] at the default rank cutoff.
pub fn choi_to_kraus_default(j: &ChoiMatrix) -> Result<KrausChannel> {
    choi_to_kraus(j, DEFAULT_KERNEL_CUTOFF)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, pauli_z};

    #[test]
    fn identity_choi_is_maximally_entangled() {
        let j = kraus_to_choi(&KrausChannel::identity(2));
        // sum_ab E_ab (x) E_ab
        let mut expect = ComplexMatrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                expect[(a * 2 + a, b * 2 + b)] = C64::new(1.0, 0.0);
            }
        }
        assert_eq!(j.matrix(), &expect);
        assert_eq!(j.matrix().trace().re, 2.0);
    }

    #[test]
    fn unitary_conjugation() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let ch = KrausChannel::unitary(h.clone()).unwrap();
        let out = ch.heisenberg_apply(&pauli_z()).unwrap();
        assert!((&out - &pauli_x()).max_abs() < 1e-15);
    }

    #[test]
    fn non_unital_family_rejected() {
        let v = ComplexMatrix::diag_real(&[1.0, 0.5]);
        assert!(matches!(KrausChannel::new(vec![v]), Err(QotError::BrokenUnitality { .. })));
        assert!(KrausChannel::new(vec![]).is_err());
    }

    #[test]
    fn replacer_of_pure_target() {
        let rho = DensityMatrix::basis(2, 0).unwrap();
        let ch = replacer_channel(&rho, 3).unwrap();
        assert_eq!(ch.num_kraus(), 3);
        let tau = DensityMatrix::maximally_mixed(3);
        let out = ch.predual_apply(tau.matrix()).unwrap();
        assert!((&out - rho.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn replacer_of_mixed_qubit() {
        let rho = DensityMatrix::maximally_mixed(2);
        let ch = replacer_channel(&rho, 2).unwrap();
        assert_eq!(ch.num_kraus(), 4);
        for v in ch.kraus() {
            let nonzero: Vec<_> = v.as_slice().iter().filter(|z| z.norm() > 0.0).collect();
            assert_eq!(nonzero.len(), 1);
            assert!((nonzero[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        // Phi(x) = tr(x)/2 * 1
        let x = ComplexMatrix::from_real_rows(&[&[3.0, 1.0], &[1.0, -1.0]]);
        let out = ch.heisenberg_apply(&x).unwrap();
        assert!((&out - &ComplexMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn choi_validation() {
        let bad = ComplexMatrix::identity(4);
        assert!(ChoiMatrix::new(2, 2, bad).is_err());
        let good = kraus_to_choi(&KrausChannel::identity(2));
        assert!(ChoiMatrix::new(2, 2, good.matrix().clone()).is_ok());
        let mut neg = good.matrix().clone();
        neg[(1, 1)] = C64::new(-1e-3, 0.0);
        neg[(2, 2)] = C64::new(1.0 + 1e-3, 0.0);
        assert!(matches!(ChoiMatrix::new(2, 2, neg), Err(QotError::NotPsd { .. })));
    }

    #[test]
    fn compose_dimension_check() {
        let a = KrausChannel::identity(2);
        let b = KrausChannel::identity(3);
        assert!(compose(&a, &b).is_err());
        let c = compose(&a, &a).unwrap();
        assert_eq!(c, KrausChannel::identity(2));
    }
}
