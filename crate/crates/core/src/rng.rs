//! Seed and stream derivation.
//!
//! Every random quantity is derived from one user seed. A purpose selects a
//! ChaCha stream and an index selects a position within it, so derived seeds
//! do not depend on the order in which they are requested.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream id per purpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    DataGen = 0,
    MonteCarlo = 1,
}

/// Derives the `index`-th seed of `purpose` from `seed`.
pub fn derive_seed(seed: u64, purpose: Stream, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

/// Generator for Monte Carlo sample `sample` under `seed`.
pub fn sample_rng(seed: u64, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    rng
}
