//! Seeded multivariate normal sampling through a rank-revealing square-root
//! factor, so exactly singular covariances (the star process) sample from
//! their supporting subspace.

use crate::error::{Error, Result};
use crate::gaussian::{GaussianSpec, EIGENVALUE_FLOOR, PSD_TOLERANCE};
use crate::linalg::{self, JACOBI_LIMIT};
use crate::scalar::{cst, Scalar};
use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// Derive a stream seed for shard `shard` of a run seeded with `seed`
/// (splitmix64 finalizer over the pair), so parallel shards are independent
/// and merge order is fixed.
pub fn shard_seed(seed: u64, shard: u64) -> u64 {
    let mut z = seed ^ shard.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Reusable sampler: `x = mean + L u` with `L L^T = cov` (rank-revealing).
#[derive(Debug, Clone)]
pub struct Sampler<F> {
    mean: Vec<F>,
    factor: Array2<F>,
    rank: usize,
    floored: bool,
}

impl<F: Scalar> Sampler<F> {
    pub fn new(spec: &GaussianSpec<F>) -> Result<Self> {
        let n = spec.n();
        if n > JACOBI_LIMIT {
            return Err(Error::FactorizationFailure(format!(
                "sampling supports up to {JACOBI_LIMIT} dimensions, got {n}"
            )));
        }
        let trace: f64 = (0..n).map(|i| spec.cov()[[i, i]].to_f64().unwrap()).sum();
        if spec.min_eigenvalue() < -PSD_TOLERANCE * trace.max(1e-300) {
            return Err(Error::FactorizationFailure(format!(
                "covariance indefinite (min eigenvalue {})",
                spec.min_eigenvalue()
            )));
        }
        let floor = cst::<F>(EIGENVALUE_FLOOR * trace);
        let (factor, rank, floored) = linalg::sqrt_factor(spec.cov(), floor);
        Ok(Sampler {
            mean: spec.mean().to_vec(),
            factor,
            rank,
            floored,
        })
    }

    /// Rank of the factor (dimensions actually driven by noise).
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// True when eigenvalues were dropped at the floor.
    pub fn floored(&self) -> bool {
        self.floored
    }

    pub fn n(&self) -> usize {
        self.mean.len()
    }

    /// `out = mean +- L u`; `negate` gives the antithetic partner.
    pub fn apply_factor(&self, u: &[F], negate: bool, out: &mut [F]) {
        debug_assert_eq!(out.len(), self.n());
        debug_assert_eq!(u.len(), self.rank);
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = F::zero();
            for (k, &uk) in u.iter().enumerate() {
                acc += self.factor[[i, k]] * uk;
            }
            *o = if negate {
                self.mean[i] - acc
            } else {
                self.mean[i] + acc
            };
        }
    }

    /// Draw one vector into `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [F]) {
        let mut u = vec![F::zero(); self.rank];
        for v in u.iter_mut() {
            *v = F::standard_normal(rng);
        }
        self.apply_factor(&u, false, out);
    }

    /// `count` i.i.d. rows, bit-identical for a given seed.
    pub fn sample_matrix(&self, count: usize, seed: u64) -> Array2<F> {
        let n = self.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Array2::<F>::zeros((count, n));
        let mut row = vec![F::zero(); n];
        for r in 0..count {
            self.sample_into(&mut rng, &mut row);
            for (c, &v) in row.iter().enumerate() {
                out[[r, c]] = v;
            }
        }
        out
    }
}

/// Result of a sampling run.
#[derive(Debug, Clone)]
pub struct SampleRun<F> {
    pub samples: Array2<F>,
    pub rank: usize,
    pub floored: bool,
}

/// Draw `count` i.i.d. vectors with the spec's law; rows are samples.
pub fn sample<F: Scalar>(spec: &GaussianSpec<F>, count: usize, seed: u64) -> Result<SampleRun<F>> {
    if count == 0 {
        return Err(Error::OutOfRange("sample count must be at least 1".into()));
    }
    let sampler = Sampler::new(spec)?;
    Ok(SampleRun {
        samples: sampler.sample_matrix(count, seed),
        rank: sampler.rank(),
        floored: sampler.floored(),
    })
}
