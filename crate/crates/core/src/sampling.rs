//! Deterministic per-point random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent stream for sample `index` of a run seeded with `seed`.
pub fn point_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}
