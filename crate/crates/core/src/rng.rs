//! Seeded, platform-stable random streams.
//!
//! Every generator is ChaCha8 keyed by the 64-bit base seed; replicate `k`
//! reads ChaCha stream `k`, so replicates are disjoint and independent of the
//! order in which they are executed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for replicate `index` under `base_seed`.
pub fn substream(base_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(index);
    rng
}

/// Derives a child seed, used when a stream needs to be split further
/// (for example one bootstrap per Monte Carlo cell).
pub fn mix_seed(base_seed: u64, tag: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = base_seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
