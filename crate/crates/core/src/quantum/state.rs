use crate::error::{QotError, Result};
use crate::linalg::{hermitian_eig, pauli_x, pauli_y, pauli_z, ComplexMatrix, PsdSpectrum, C64, DEFAULT_KERNEL_CUTOFF};
use crate::tolerances::{OBSERVABLE_TOL, STATE_TOL};

/// Positive semidefinite, trace-one Hermitian matrix. Singular states are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: PsdSpectrum,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(QotError::InvalidState(format!(
                "state must be a non-empty square matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermitian_defect();
        if defect > STATE_TOL {
            return Err(QotError::InvalidState(format!("not Hermitian (asymmetry {defect:.3e})")));
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(QotError::InvalidState(format!("trace deviates from 1 by {:.3e}", trace - 1.0)));
        }
        let matrix = matrix.hermitian_part();
        let eig = hermitian_eig(&matrix)?;
        if eig.min_eigenvalue() < -STATE_TOL {
            return Err(QotError::InvalidState(format!(
                "not positive semidefinite (eigenvalue {:.3e})",
                eig.min_eigenvalue()
            )));
        }
        let spectrum = PsdSpectrum::from_eig(eig, DEFAULT_KERNEL_CUTOFF);
        Ok(Self { matrix, spectrum })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64)).expect("maximally mixed state is valid")
    }

    /// `|psi><psi|` for a (not necessarily normalised) vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QotError::InvalidState("zero vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    /// Computational basis state `|k><k|`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(QotError::InvalidState(format!("basis index {k} out of range for dim {dim}")));
        }
        let mut psi = vec![C64::new(0.0, 0.0); dim];
        psi[k] = C64::new(1.0, 0.0);
        Self::pure(&psi)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &PsdSpectrum {
        &self.spectrum
    }

    /// `rho^z` on the support.
    pub fn power(&self, z: C64) -> ComplexMatrix {
        self.spectrum.power(z)
    }

    pub fn real_power(&self, p: f64) -> ComplexMatrix {
        self.spectrum.real_power(p)
    }

    pub fn sqrt(&self) -> ComplexMatrix {
        self.spectrum.real_power(0.5)
    }

    pub fn support_projection(&self) -> ComplexMatrix {
        self.spectrum.support_projection()
    }

    pub fn rank(&self) -> usize {
        self.spectrum.rank()
    }

    /// `tr(rho x)`
    pub fn expectation(&self, x: &ComplexMatrix) -> f64 {
        crate::linalg::hs_inner(&self.matrix, x).map(|z| z.re).unwrap_or(f64::NAN)
    }
}

/// A d-tuple of Hermitian cost operators sharing one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableTuple {
    dim: usize,
    entries: Vec<ComplexMatrix>,
}

impl ObservableTuple {
    pub fn new(dim: usize, entries: Vec<ComplexMatrix>) -> Result<Self> {
        let mut cleaned = Vec::with_capacity(entries.len());
        for (k, x) in entries.into_iter().enumerate() {
            if x.shape() != (dim, dim) {
                return Err(QotError::InvalidObservable(format!(
                    "entry {k} has shape {:?}, expected {dim}x{dim}",
                    x.shape()
                )));
            }
            let defect = x.hermitian_defect();
            if defect > OBSERVABLE_TOL {
                return Err(QotError::InvalidObservable(format!(
                    "entry {k} is not Hermitian (asymmetry {defect:.3e})"
                )));
            }
            cleaned.push(x.hermitian_part());
        }
        Ok(Self { dim, entries: cleaned })
    }

    /// `(X, Y, Z)` on a qubit.
    pub fn pauli() -> Self {
        Self { dim: 2, entries: vec![pauli_x(), pauli_y(), pauli_z()] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ComplexMatrix] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexMatrix> {
        self.entries.iter()
    }

    /// First `d` entries.
    pub fn truncated(&self, d: usize) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().take(d).cloned().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_trace() {
        let m = ComplexMatrix::diag_real(&[0.5, 0.4]);
        let err = DensityMatrix::new(m).unwrap_err();
        assert!(err.to_string().contains("trace deviates"));
    }

    #[test]
    fn rejects_negative() {
        let m = ComplexMatrix::diag_real(&[1.1, -0.1]);
        assert!(DensityMatrix::new(m).unwrap_err().to_string().contains("positive semidefinite"));
    }

    #[test]
    fn singular_states_allowed() {
        let s = DensityMatrix::basis(3, 1).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.support_projection(), s.matrix().clone());
    }

    #[test]
    fn observables_must_be_hermitian() {
        let mut y = pauli_y();
        y[(0, 1)] = C64::new(0.0, 1.0);
        assert!(ObservableTuple::new(2, vec![y]).is_err());
        assert!(ObservableTuple::new(3, vec![pauli_x()]).is_err());
        assert_eq!(ObservableTuple::pauli().len(), 3);
    }
}
