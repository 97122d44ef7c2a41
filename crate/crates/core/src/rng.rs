//! Seeded, splittable random-number plumbing.
//!
//! Every run is driven by one 64-bit master seed. Batch generation derives
//! an independent stream per sample from `(seed, sample index)`, so batches
//! are reproducible bit-for-bit regardless of how samples are scheduled
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout: seedable, fast, with 2^64 independent
/// streams.
pub type SeededRng = ChaCha8Rng;

/// Generator for single-stream use.
pub fn master_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for one sample of a batch: the master seed keys the
/// generator and the sample index selects the stream.
pub fn sample_rng(seed: u64, sample_index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    rng
}
