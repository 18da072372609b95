//! Seeded randomness.
//!
//! Every stochastic choice in this crate (weight initialization, epoch
//! shuffles, synthetic data) draws from a [`ChaCha8Rng`] keyed by a `u64`
//! seed. ChaCha8 is a counter-based generator with a stable, portable output
//! stream, which is what makes the crate's bit-for-bit reproducibility
//! guarantees testable across runs and machines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Returns the crate's deterministic generator for `seed`.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
