//! The isometry `L_v`, the partial isometry `R_v` and `L_v^*` on tuples of
//! Hilbert-Schmidt operators indexed by the Kraus family.

use crate::error::{dim_mismatch, Result};
use crate::kms::check_marginal;
use crate::linalg::{hs_inner, ComplexMatrix, C64};
use crate::quantum::{DensityMatrix, KrausChannel};

/// Element of the direct sum of `S^2(K; H)` over the Kraus index.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTuple {
    pub blocks: Vec<ComplexMatrix>,
}

impl OperatorTuple {
    pub fn zeros(count: usize, rows: usize, cols: usize) -> Self {
        Self { blocks: vec![ComplexMatrix::zeros(rows, cols); count] }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.blocks.iter().map(ComplexMatrix::frobenius_norm_sq).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.len() != other.len() {
            return Err(dim_mismatch("operator tuples of different length"));
        }
        let mut acc = C64::new(0.0, 0.0);
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            acc += hs_inner(a, b)?;
        }
        Ok(acc)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(dim_mismatch("operator tuples of different length"));
        }
        let mut blocks = Vec::with_capacity(self.len());
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            if a.shape() != b.shape() {
                return Err(dim_mismatch("operator tuple blocks of different shape"));
            }
            blocks.push(a - b);
        }
        Ok(Self { blocks })
    }

    /// `||self - other||_2^2` without materialising the difference.
    pub(crate) fn dist_sq(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>())
            .sum()
    }
}

/// `L_v y = (v_j y)_j`.
pub fn l_apply(ch: &KrausChannel, y: &ComplexMatrix) -> Result<OperatorTuple> {
    let m = ch.dim_out();
    if y.shape() != (m, m) {
        return Err(dim_mismatch(format!("L_v expects a {m}x{m} operator, got {:?}", y.shape())));
    }
    Ok(OperatorTuple { blocks: ch.kraus().iter().map(|v| v * y).collect() })
}

/// `L_v^* (z_j) = sum_j v_j^* z_j`.
pub fn lstar_apply(ch: &KrausChannel, zs: &OperatorTuple) -> Result<ComplexMatrix> {
    if zs.len() != ch.num_kraus() {
        return Err(dim_mismatch(format!("tuple of length {} for {} Kraus operators", zs.len(), ch.num_kraus())));
    }
    let shape = (ch.dim_in(), ch.dim_out());
    let mut out = ComplexMatrix::zeros(ch.dim_out(), ch.dim_out());
    for (v, z) in ch.kraus().iter().zip(&zs.blocks) {
        if z.shape() != shape {
            return Err(dim_mismatch(format!("block {:?}, expected {shape:?}", z.shape())));
        }
        out += &(&v.adjoint() * z);
    }
    Ok(out)
}

/// Precomputed factors `rho_+^{-1/2} v_j sigma^{1/2}` realising `R_v` as
/// `A -> (A rho_+^{-1/2} v_j sigma^{1/2})_j`.
///
/// On `A = x rho^{1/2}` this gives `(x v_j sigma^{1/2})_j` because `v_j sigma^{1/2}`
/// has range in `supp(rho)`; on `A` with `A P_rho = 0` it vanishes.
#[derive(Clone, Debug)]
pub struct RMap {
    factors: Vec<ComplexMatrix>,
    dim_in: usize,
}

impl RMap {
    pub fn new(ch: &KrausChannel, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Self> {
        check_marginal(ch, rho, sigma)?;
        let inv = rho.real_power(-0.5);
        let ss = sigma.sqrt();
        let factors = ch.kraus().iter().map(|v| &(&inv * v) * &ss).collect();
        Ok(Self { factors, dim_in: ch.dim_in() })
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<OperatorTuple> {
        let n = self.dim_in;
        if a.shape() != (n, n) {
            return Err(dim_mismatch(format!("R_v expects a {n}x{n} operator, got {:?}", a.shape())));
        }
        Ok(OperatorTuple { blocks: self.factors.iter().map(|f| a * f).collect() })
    }
}

/// `R_v A`; requires `Phi_*(sigma) = rho`.
pub fn r_apply(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    a: &ComplexMatrix,
) -> Result<OperatorTuple> {
    RMap::new(ch, rho, sigma)?.apply(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{random_observable, random_state};

    #[test]
    fn identity_channel_l_is_trivial() {
        let y = random_observable(3, 8);
        let t = l_apply(&KrausChannel::identity(3), &y).unwrap();
        assert_eq!(t.blocks, vec![y.clone()]);
        let z = l_apply(&KrausChannel::identity(3), &ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(z.norm(), 0.0);
        assert_eq!(lstar_apply(&KrausChannel::identity(3), &t).unwrap(), y);
    }

    #[test]
    fn identity_channel_r() {
        let rho = random_state(3, 3, 2).unwrap();
        let x = random_observable(3, 5);
        let a = &x * &rho.sqrt();
        let t = r_apply(&KrausChannel::identity(3), &rho, &rho, &a).unwrap();
        assert!((&t.blocks[0] - &a).max_abs() < 1e-12);
    }

    #[test]
    fn r_vanishes_on_kernel_columns() {
        let rho = DensityMatrix::basis(2, 0).unwrap();
        let mut a = ComplexMatrix::zeros(2, 2);
        a[(0, 1)] = C64::new(1.0, 0.5);
        a[(1, 1)] = C64::new(-2.0, 0.0);
        let t = r_apply(&KrausChannel::identity(2), &rho, &rho, &a).unwrap();
        assert_eq!(t.norm(), 0.0);
    }

    #[test]
    fn shape_errors() {
        let ch = KrausChannel::identity(2);
        assert!(l_apply(&ch, &ComplexMatrix::zeros(3, 3)).is_err());
        assert!(lstar_apply(&ch, &OperatorTuple::zeros(2, 2, 2)).is_err());
    }
}
