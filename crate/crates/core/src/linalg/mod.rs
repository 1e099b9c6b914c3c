//! Dense complex linear algebra: eigendecomposition, PSD matrix powers,
//! partial traces and Hilbert-Schmidt geometry.

mod eig;
mod matrix;
mod power;

pub use eig::{hermitian_eig, HermitianEig, HERMITIAN_TOL};
pub use matrix::{pauli_x, pauli_y, pauli_z, ComplexMatrix, C64, I, ONE, ZERO};
pub use power::{matrix_power, pinv_power, support_projection, PsdSpectrum, DEFAULT_KERNEL_CUTOFF};

use crate::error::{dim_mismatch, QotError, Result};

/// Tensor factor selector for [`partial_trace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Traces out one factor of a matrix on `C^d1 (x) C^d2` (Kronecker ordering,
/// first factor is the slow index).
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), over: Factor) -> Result<ComplexMatrix> {
    let (d1, d2) = dims;
    if m.rows() != d1 * d2 || m.cols() != d1 * d2 {
        return Err(dim_mismatch(format!(
            "partial trace of {}x{} matrix over {d1}x{d2} tensor space",
            m.rows(),
            m.cols()
        )));
    }
    Ok(match over {
        Factor::First => ComplexMatrix::from_fn(d2, d2, |b, c| (0..d1).map(|a| m[(a * d2 + b, a * d2 + c)]).sum()),
        Factor::Second => ComplexMatrix::from_fn(d1, d1, |a, b| (0..d2).map(|k| m[(a * d2 + k, b * d2 + k)]).sum()),
    })
}

/// Hilbert-Schmidt inner product `tr(A^* B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(dim_mismatch(format!("hs_inner of {:?} and {:?}", a.shape(), b.shape())));
    }
    Ok(a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * y).sum())
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Singular values, descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let gram = if a.rows() >= a.cols() { &a.adjoint() * a } else { a * &a.adjoint() };
    let eig = hermitian_eig(&gram)?;
    // Gram eigenvalues below roundoff would otherwise surface as sqrt(eps) singular values.
    let floor = gram.rows() as f64 * f64::EPSILON * eig.max_eigenvalue().max(0.0);
    Ok(eig.eigenvalues.iter().rev().map(|&l| if l <= floor { 0.0 } else { l.sqrt() }).collect())
}

/// Schatten p-norm, `p >= 1`.
pub fn schatten_norm(a: &ComplexMatrix, p: u32) -> Result<f64> {
    match p {
        0 => Err(QotError::InvalidParameters("Schatten p must be at least 1".into())),
        2 => Ok(a.frobenius_norm()),
        _ => {
            let sv = singular_values(a)?;
            let pf = f64::from(p);
            Ok(sv.iter().map(|s| s.powf(pf)).sum::<f64>().powf(1.0 / pf))
        }
    }
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn hermitian_trace_norm(a: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(&a.hermitian_part())?;
    Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::diag_real(&[0.25, 0.75]);
        let b = pauli_x();
        let ab = a.kron(&b);
        assert_eq!(partial_trace(&ab, (2, 2), Factor::First).unwrap(), b);
        let id = ComplexMatrix::identity(4);
        assert_eq!(partial_trace(&id, (2, 2), Factor::Second).unwrap(), ComplexMatrix::identity(2).scale_real(2.0));
        assert!(partial_trace(&id, (3, 2), Factor::First).is_err());
    }

    #[test]
    fn inner_products_and_norms() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), C64::new(2.0, 0.0));
        let d = ComplexMatrix::diag_real(&[3.0, -4.0]);
        assert!((schatten_norm(&d, 1).unwrap() - 7.0).abs() < 1e-14);
        assert!((schatten_norm(&d, 2).unwrap() - 5.0).abs() < 1e-14);
        assert!((schatten_norm(&d, 4).unwrap() - 337f64.powf(0.25)).abs() < 1e-13);
        assert!((schatten_norm(&d, 3).unwrap() - 91f64.cbrt()).abs() < 1e-13);
        assert!(schatten_norm(&d, 0).is_err());
        assert!(hs_inner(&i2, &ComplexMatrix::identity(3)).is_err());
    }
}
