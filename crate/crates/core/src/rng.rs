//! Reproducible seeding for replicated simulations.
//!
//! Replication `r` of a run with master seed `s` always draws from the same
//! ChaCha8 stream, keyed by `mix(s, r)`, whatever the worker count or
//! execution order. Independent sub-streams of the same replication (for
//! example the thinning decisions of a coupled build) use the ChaCha stream
//! selector.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Default master seed used when none is given (reads "D M 2009").
pub const DEFAULT_SEED: u64 = 0xD4D_2009;

/// Stream used for graph generation.
pub const STREAM_GRAPH: u64 = 0;
/// Stream used for choosing the size-bias index.
pub const STREAM_INDEX: u64 = 1;
/// Stream used for thinning decisions.
pub const STREAM_THIN: u64 = 2;
/// Stream used for reference normal samples.
pub const STREAM_NOISE: u64 = 3;

/// SplitMix64 finaliser.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `rep` of a run with master seed `master`.
#[inline]
pub fn mix(master: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(master) ^ rep.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Generator for one stream of a given (already mixed) seed.
pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for `stream` of replication `rep`.
pub fn replication(master: u64, rep: u64, stream_id: u64) -> SimRng {
    stream(mix(master, rep), stream_id)
}
