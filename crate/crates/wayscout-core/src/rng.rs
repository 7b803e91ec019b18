//! Seed derivation for the independent random streams of a run.
//!
//! A run is controlled by one master seed. Generator placement, true-map
//! synthesis, and a-priori-estimate synthesis each draw from their own
//! stream so that, say, changing the generator count never shifts the
//! terrain that gets generated.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream for Voronoi generator placement.
pub const STREAM_GENERATORS: u64 = 1;
/// Stream for synthesizing the true costmap.
pub const STREAM_TRUTH: u64 = 2;
/// Stream for synthesizing the a-priori estimate costmap.
pub const STREAM_ESTIMATE: u64 = 3;

/// Mixes a master seed with a stream tag into an independent sub-seed.
///
/// Uses the splitmix64 finalizer, so nearby master seeds and nearby stream
/// tags still land far apart.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// A deterministic generator for the given sub-seed.
pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
