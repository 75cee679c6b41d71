//! Seeded random streams.
//!
//! All randomness derives from one 64-bit seed. The seed keys a ChaCha8 stream
//! cipher (expanded with `SeedableRng::seed_from_u64`) and each consumer reads
//! its own stream id, so draws are reproducible in any language with a ChaCha8
//! implementation and do not depend on call order between consumers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for stream `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a child seed, e.g. one per match of a tournament.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    stream(seed, 0x5eed_0000_0000_0000 ^ index).next_u64()
}
