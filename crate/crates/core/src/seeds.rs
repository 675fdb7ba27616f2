//! Seed derivation for reproducible parallel replicas.
//!
//! Every random draw in the crate is traceable to a single master seed.
//! Work units (replica, percolation run, ...) get their own ChaCha stream
//! seeded by `derive_seed(master, stream, index)`, so results do not depend
//! on scheduling or thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; the usual seed-expansion mixer.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives an independent seed for work unit `index` of logical stream
/// `stream`, all rooted at `master`.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut x = splitmix64(master ^ splitmix64(stream));
    x = splitmix64(x ^ splitmix64(index));
    x
}

/// A deterministic generator for the given seed.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
