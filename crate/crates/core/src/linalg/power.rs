//! Functions of PSD matrices with the kernel convention `0^z = 0`.

use super::eig::{hermitian_eig, HermitianEig};
use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{QotError, Result};

/// Default relative eigenvalue threshold separating the kernel from the support.
pub const DEFAULT_KERNEL_CUTOFF: f64 = 1e-12;

/// Cached spectral data of a PSD matrix.
///
/// Eigenvalues at or below `cutoff * lambda_max` are treated as exact zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdSpectrum {
    eig: HermitianEig,
    threshold: f64,
}

impl PsdSpectrum {
    pub fn new(a: &ComplexMatrix, cutoff: f64) -> Result<Self> {
        let eig = hermitian_eig(a)?;
        let lmax = eig.max_eigenvalue().max(0.0);
        let lmin = eig.min_eigenvalue();
        if lmin < -cutoff * lmax || (lmax == 0.0 && lmin < 0.0) {
            return Err(QotError::NegativeEigenvalue { eigenvalue: lmin });
        }
        Ok(Self { eig, threshold: cutoff * lmax })
    }

    /// Wraps an existing decomposition; the caller has already checked positivity.
    pub fn from_eig(eig: HermitianEig, cutoff: f64) -> Self {
        let threshold = cutoff * eig.max_eigenvalue().max(0.0);
        Self { eig, threshold }
    }

    pub fn eig(&self) -> &HermitianEig {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    fn on_support(&self, l: f64) -> bool {
        l > self.threshold && l > 0.0
    }

    /// Eigenvalues with kernel entries set to zero.
    pub fn support_eigenvalues(&self) -> Vec<f64> {
        self.eig.eigenvalues.iter().map(|&l| if self.on_support(l) { l } else { 0.0 }).collect()
    }

    pub fn rank(&self) -> usize {
        self.eig.eigenvalues.iter().filter(|&&l| self.on_support(l)).count()
    }

    /// `sum_{lambda > cutoff} lambda^z |e><e|` for any complex exponent.
    pub fn power(&self, z: C64) -> ComplexMatrix {
        self.eig.map_eigenvalues(|l| if self.on_support(l) { (z * l.ln()).exp() } else { ZERO })
    }

    pub fn real_power(&self, p: f64) -> ComplexMatrix {
        self.eig.map_eigenvalues(|l| if self.on_support(l) { C64::new(l.powf(p), 0.0) } else { ZERO })
    }

    pub fn support_projection(&self) -> ComplexMatrix {
        self.eig.map_eigenvalues(|l| if self.on_support(l) { C64::new(1.0, 0.0) } else { ZERO })
    }

    /// The cleaned matrix `sum_{lambda > cutoff} lambda |e><e|`.
    pub fn clipped(&self) -> ComplexMatrix {
        self.real_power(1.0)
    }
}

/// `A^z` on the support of a PSD matrix, zero on its kernel.
pub fn matrix_power(a: &ComplexMatrix, z: C64, kernel_cutoff: f64) -> Result<ComplexMatrix> {
    Ok(PsdSpectrum::new(a, kernel_cutoff)?.power(z))
}

/// Moore-Penrose style negative power: `A_+^z` for real `z < 0`.
pub fn pinv_power(a: &ComplexMatrix, z: f64, kernel_cutoff: f64) -> Result<ComplexMatrix> {
    Ok(PsdSpectrum::new(a, kernel_cutoff)?.real_power(z))
}

pub fn support_projection(a: &ComplexMatrix, kernel_cutoff: f64) -> Result<ComplexMatrix> {
    Ok(PsdSpectrum::new(a, kernel_cutoff)?.support_projection())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn scalar_quarter_power() {
        let a = ComplexMatrix::diag_real(&[0.5, 0.5]);
        let p = matrix_power(&a, C64::new(0.25, 0.0), DEFAULT_KERNEL_CUTOFF).unwrap();
        let expect = ComplexMatrix::identity(2).scale_real(0.5f64.powf(0.25));
        assert!(close(&p, &expect, 1e-15));
    }

    #[test]
    fn kernel_convention_for_imaginary_exponent() {
        let a = ComplexMatrix::diag_real(&[1.0, 0.0]);
        for t in [-3.0, 0.0, 0.7, 10.0] {
            let p = matrix_power(&a, C64::new(0.25, t), DEFAULT_KERNEL_CUTOFF).unwrap();
            assert!(close(&p, &a, 1e-15));
        }
    }

    #[test]
    fn pinv_power_with_kernel() {
        let a = ComplexMatrix::diag_real(&[4.0, 0.0]);
        let p = pinv_power(&a, -0.5, DEFAULT_KERNEL_CUTOFF).unwrap();
        assert!(close(&p, &ComplexMatrix::diag_real(&[0.5, 0.0]), 1e-15));
        let id = pinv_power(&ComplexMatrix::identity(3), -0.5, DEFAULT_KERNEL_CUTOFF).unwrap();
        assert!(close(&id, &ComplexMatrix::identity(3), 1e-15));
    }

    #[test]
    fn cutoff_semantics() {
        let a = ComplexMatrix::diag_real(&[1.0, 1e-15]);
        let p = support_projection(&a, DEFAULT_KERNEL_CUTOFF).unwrap();
        assert_eq!(p, ComplexMatrix::diag_real(&[1.0, 0.0]));
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let a = ComplexMatrix::diag_real(&[1.0, -1e-6]);
        assert!(matches!(
            matrix_power(&a, C64::new(0.5, 0.0), DEFAULT_KERNEL_CUTOFF),
            Err(QotError::NegativeEigenvalue { .. })
        ));
        // roundoff-sized negatives are absorbed into the kernel
        let b = ComplexMatrix::diag_real(&[1.0, -1e-14]);
        assert!(matrix_power(&b, C64::new(0.5, 0.0), DEFAULT_KERNEL_CUTOFF).is_ok());
    }
}
