//! Seeded random states, unitaries and channels.
//!
//! Everything downstream of a [`RandomSource`] is a pure function of its seed:
//! `derive` mixes an index into a child seed, and [`RandomSource::rng`] yields
//! a ChaCha20 stream. Samplers take `&mut impl Rng` so callers control the
//! stream explicitly.

use crate::channel::Channel;
use crate::error::{QchanError, Result};
use crate::linalg::{ComplexMatrix, Subsystem, C64};
use crate::metrics::DensityMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// Smallest eigenvalue the environment-trace factor may have before a random
/// channel draw is rejected and resampled.
const CONDITIONING_FLOOR: f64 = 1e-12;
const RESAMPLE_ATTEMPTS: usize = 8;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A named, reproducible randomness stream.
///
/// `derive` is a pure function of `(seed, index)`, so a tree of independent
/// child streams can be laid out deterministically regardless of evaluation
/// order or thread count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSource {
    seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child stream `index`; children of distinct indices are decorrelated.
    pub fn derive(&self, index: u64) -> RandomSource {
        RandomSource {
            seed: splitmix64(splitmix64(self.seed) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        }
    }

    /// A fresh ChaCha20 generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.seed)
    }
}

/// Ginibre matrix: i.i.d. entries `(N(0,1) + i·N(0,1)) / √2`.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        data.push(C64::new(re * scale, im * scale));
    }
    ComplexMatrix::from_vec_row_major(rows, cols, data).expect("sized to rows × cols")
}

/// Random density matrix `GG†/tr(GG†)` with `G` Ginibre `d×k`; `k = d` gives
/// the Hilbert–Schmidt ensemble, smaller `k` concentrates on lower rank.
pub fn random_density_with_rank<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> DensityMatrix {
    assert!(dim >= 1 && rank >= 1, "dimension and rank must be positive");
    let g = ginibre(rng, dim, rank);
    let w = g.matmul(&g.adjoint()).expect("shapes agree");
    let tr = w.trace().re;
    DensityMatrix::new_unchecked(w.scale(C64::new(1.0 / tr, 0.0)))
}

/// Random density matrix from the Hilbert–Schmidt ensemble (`rank = dim`).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    random_density_with_rank(rng, dim, dim)
}

/// Haar-random unitary via QR of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ginibre(rng, dim, dim)
        .qr_unitary()
        .expect("ginibre output is square")
}

/// Random CP-TP channel: a Wishart dynamical-matrix candidate `W = XX†` with
/// `X` Ginibre `d²×k`, projected onto trace preservation by the sandwich
/// `(I ⊗ Y^{−1/2}) W (I ⊗ Y^{−1/2})` with `Y` the partial trace of `W` over
/// the first subsystem.
///
/// `k = 1` yields Haar-random unitary channels; `k = d²` (see
/// [`random_channel`]) is the flat measure. Draws whose `Y` is nearly
/// singular are resampled, and an error is returned if that keeps failing.
pub fn random_channel_with_rank<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    kraus_rank: usize,
) -> Result<Channel> {
    if dim < 2 {
        return Err(QchanError::InvalidParameter {
            name: "dim".into(),
            value: format!("{dim}"),
            bound: "≥ 2".into(),
        });
    }
    if kraus_rank < 1 {
        return Err(QchanError::InvalidParameter {
            name: "kraus_rank".into(),
            value: format!("{kraus_rank}"),
            bound: "≥ 1".into(),
        });
    }
    for _ in 0..RESAMPLE_ATTEMPTS {
        let x = ginibre(rng, dim * dim, kraus_rank);
        let w = x.matmul(&x.adjoint()).expect("shapes agree");
        let y = w
            .partial_trace(dim, dim, Subsystem::First)
            .expect("w factors as d×d");
        let eig = y.eigh().expect("y is hermitian by construction");
        if eig.min_eigenvalue() < CONDITIONING_FLOOR {
            continue;
        }
        let inv_roots: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&l| 1.0 / l.max(CONDITIONING_FLOOR).sqrt())
            .collect();
        let y_inv_sqrt = eig.recombine(&inv_roots);
        let sandwich = ComplexMatrix::identity(dim).kron(&y_inv_sqrt);
        let d_matrix = sandwich
            .matmul(&w)
            .expect("shapes agree")
            .matmul(&sandwich)
            .expect("shapes agree");
        return Channel::from_dynamical(d_matrix);
    }
    Err(QchanError::Numerical(format!(
        "random channel draw at dim {dim}, rank {kraus_rank} kept hitting a \
         near-singular environment trace"
    )))
}

/// Random CP-TP channel from the flat measure (`kraus_rank = d²`).
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<Channel> {
    random_channel_with_rank(rng, dim, dim * dim)
}
