//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a 64-bit value.
//! Derived streams (per trial, per sampling block) mix the parent seed with an
//! index through SplitMix64 so that results never depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 finaliser applied to `x + γ`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial_id` of a run with master seed `seed`:
/// `splitmix64(seed + trial_id)` (wrapping).
pub fn trial_seed(seed: u64, trial_id: u64) -> u64 {
    splitmix64(seed.wrapping_add(trial_id))
}

/// Seed of an independent sub-stream, e.g. one sampling block.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ stream.wrapping_mul(GOLDEN_GAMMA))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
