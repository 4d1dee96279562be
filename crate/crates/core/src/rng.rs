//! Reproducible randomness. Every Monte-Carlo loop derives one stream per
//! trial from a root seed, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for trial `index` under `root`.
pub fn trial_rng(root: u64, index: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(mix(root ^ mix(index)))
}
