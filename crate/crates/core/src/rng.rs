//! Seeded random number generation.
//!
//! Every stochastic routine in the crate draws from a [`SeededRng`], a thin
//! wrapper around ChaCha8 seeded through `SeedableRng::seed_from_u64`. ChaCha
//! output is specified bit-for-bit, so a seed reproduces the same stream on
//! every platform. Gaussian draws use `rand_distr::StandardNormal`, which is
//! computed with portable IEEE-754 double arithmetic.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Generator for an independent trial: seeded with `seed ^ index`.
    pub fn for_trial(seed: u64, index: u64) -> Self {
        Self::new(seed ^ index)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for SeededRng {
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
