//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit seed and a 64-bit
//! stream id. Monte Carlo replicate `r` always reads from stream `r` of its
//! study seed, so results do not depend on how replicates are scheduled.

use rand::distr::Open01;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomStream {
    inner: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    /// Stream `stream` of the generator keyed by `seed`.
    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// Uniform draw from the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.sample(Open01)
    }

    /// Draws a fresh seed for a family of child substreams.
    pub fn fork_seed(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// SplitMix64 finalizer; derives a well-mixed seed from a master seed and a tag.
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
