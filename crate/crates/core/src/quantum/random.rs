//! Seeded instance generation.
//!
//! All randomness flows from a ChaCha20 stream keyed by a 64-bit seed and a
//! stream id, so instances are reproducible and independent of thread layout.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{DensityMatrix, KrausChannel};
use crate::error::{QotError, Result};
use crate::linalg::{ComplexMatrix, C64};

pub fn rng_from_seed(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sample `index` of a sweep keyed by `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Matrix of i.i.d. standard complex Gaussians (unit variance per entry).
pub fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * scale, im * scale)
    })
}

/// `G G^* / tr(G G^*)` for a `dim x rank` Ginibre matrix `G`.
pub fn random_state(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(QotError::InvalidRank { rank, dim });
    }
    let mut rng = rng_from_seed(seed, 0);
    let g = ginibre(dim, rank, &mut rng);
    let gram = &g * &g.adjoint();
    let tr = gram.trace().re;
    DensityMatrix::new(gram.scale_real(1.0 / tr).hermitian_part())
}

/// Kraus family obtained by orthonormalising the columns of a
/// `(dim_in * num_kraus) x dim_out` Ginibre matrix and slicing it into
/// `num_kraus` blocks of `dim_in` rows.
pub fn random_channel(dim_in: usize, dim_out: usize, num_kraus: usize, seed: u64) -> Result<KrausChannel> {
    if num_kraus == 0 || dim_in == 0 || dim_out == 0 {
        return Err(QotError::InvalidParameters("channel dimensions and Kraus count must be positive".into()));
    }
    if dim_in * num_kraus < dim_out {
        return Err(QotError::InvalidParameters(format!(
            "{num_kraus} Kraus operators of shape {dim_in}x{dim_out} cannot be unital"
        )));
    }
    let mut rng = rng_from_seed(seed, 1);
    let q = orthonormal_columns(ginibre(dim_in * num_kraus, dim_out, &mut rng))?;
    let kraus =
        (0..num_kraus).map(|j| ComplexMatrix::from_fn(dim_in, dim_out, |a, b| q[(j * dim_in + a, b)])).collect();
    KrausChannel::new(kraus)
}

/// Hermitian `(G + G^*)/2` for a square Ginibre `G`.
pub fn random_observable(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = rng_from_seed(seed, 2);
    ginibre(dim, dim, &mut rng).hermitian_part()
}

/// Modified Gram-Schmidt with one re-orthogonalisation pass.
fn orthonormal_columns(mut m: ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = m.shape();
    for c in 0..cols {
        for _ in 0..2 {
            for prev in 0..c {
                let mut proj = C64::new(0.0, 0.0);
                for r in 0..rows {
                    proj += m[(r, prev)].conj() * m[(r, c)];
                }
                for r in 0..rows {
                    let sub = m[(r, prev)] * proj;
                    m[(r, c)] -= sub;
                }
            }
        }
        let norm = (0..rows).map(|r| m[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return Err(QotError::NumericalFailure("degenerate Gaussian sample".into()));
        }
        for r in 0..rows {
            m[(r, c)] /= norm;
        }
    }
    Ok(m)
}

/// A channel together with a marginal pair satisfying `Phi_*(sigma) = rho`.
#[derive(Clone, Debug)]
pub struct MarginalInstance {
    pub channel: KrausChannel,
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
}

/// Draws `(channel, sigma)` and sets `rho = Phi_*(sigma)`.
pub fn marginal_pair(
    dim_in: usize,
    dim_out: usize,
    num_kraus: usize,
    sigma_rank: usize,
    seed: u64,
) -> Result<MarginalInstance> {
    let channel = random_channel(dim_in, dim_out, num_kraus, derive_seed(seed, 0))?;
    let sigma = random_state(dim_out, sigma_rank, derive_seed(seed, 1))?;
    let rho = channel.push_forward(&sigma)?;
    Ok(MarginalInstance { channel, rho, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_rank_one() {
        let s = random_state(2, 1, 17).unwrap();
        let eig = s.spectrum().eig();
        assert!((eig.max_eigenvalue() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_rank() {
        assert!(matches!(random_state(2, 3, 1), Err(QotError::InvalidRank { .. })));
        assert!(matches!(random_state(2, 0, 1), Err(QotError::InvalidRank { .. })));
    }

    #[test]
    fn channel_unitality_by_construction() {
        for seed in 0..20 {
            let ch = random_channel(3, 2, 2, seed).unwrap();
            assert!(ch.unitality_residual() <= 1e-12);
        }
        assert!(random_channel(1, 3, 2, 0).is_err());
    }

    #[test]
    fn seeds_reproduce_bitwise() {
        let a = random_channel(2, 2, 3, 99).unwrap();
        let b = random_channel(2, 2, 3, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(random_observable(3, 5), random_observable(3, 5));
        assert_ne!(random_observable(3, 5), random_observable(3, 6));
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
    }
}
