//! Seeded random streams.
//!
//! All sampling in the crate goes through [`RngStream`]: a ChaCha8 generator
//! plus the seed and algorithm tag it was built from. The same seed always
//! reproduces the same draws on every platform, which is what makes ranking
//! runs and randomized factorizations repeatable end to end.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::DenseMatrix;

/// Identifier of the generator family backing [`RngStream`].
pub const RNG_ALGORITHM: &str = "chacha8";

/// A seeded random stream that remembers its provenance.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    /// Create a stream from an explicit seed.
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Seed this stream was built from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Name of the underlying generator algorithm.
    pub fn algorithm(&self) -> &'static str {
        RNG_ALGORITHM
    }

    /// One standard normal draw.
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform draw from `0..limit`. `limit` must be positive.
    pub fn index(&mut self, limit: usize) -> usize {
        debug_assert!(limit > 0);
        self.inner.random_range(0..limit)
    }

    /// Uniform draw from `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random_range(0.0..1.0)
    }

    /// Derive an independent child stream. The child seed mixes the parent
    /// seed with the label through splitmix64, so distinct labels give
    /// uncorrelated streams and the derivation itself is reproducible.
    pub fn fork(&self, label: u64) -> RngStream {
        let mut z = self.seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        RngStream::new(z)
    }

    /// Sample `count` distinct indices from `0..limit` in ascending order.
    /// Returns all of `0..limit` when `count >= limit`.
    pub fn distinct_indices(&mut self, count: usize, limit: usize) -> Vec<usize> {
        if count >= limit {
            return (0..limit).collect();
        }
        // Floyd's algorithm: `count` draws, no rejection loop.
        let mut chosen = std::collections::BTreeSet::new();
        for j in (limit - count)..limit {
            let t = self.index(j + 1);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        chosen.into_iter().collect()
    }
}

/// Fill a `rows x cols` matrix with standard normal draws in row-major
/// order, consuming the stream deterministically.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut RngStream) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    for v in m.data_mut() {
        *v = rng.normal();
    }
    m
}
