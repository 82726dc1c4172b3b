//! Seed derivation.
//!
//! Every experiment has one 64-bit root seed. Independent streams (trials,
//! restarts, sign draws) get their own generator seeded by
//! [`derive_seed`]`(root, stream, index)`, a SplitMix64 finalizer applied to a
//! counter. Trial `i` therefore sees the same randomness no matter how many
//! other trials run or in which order they are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type LabRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for item `index` of stream `stream` under `root`.
pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    splitmix(splitmix(splitmix(root) ^ stream.wrapping_mul(GOLDEN)) ^ index)
}

pub fn stream_rng(root: u64, stream: u64, index: u64) -> LabRng {
    LabRng::seed_from_u64(derive_seed(root, stream, index))
}

/// Named streams so that unrelated consumers never share a counter space.
pub mod streams {
    pub const RESTART: u64 = 1;
    pub const SIGNS: u64 = 2;
    pub const TRIAL: u64 = 3;
    pub const KERNEL_SAMPLES: u64 = 4;
    pub const MONTE_CARLO: u64 = 5;
    pub const PROBE: u64 = 6;
    pub const SUBSPACE: u64 = 7;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_distinct_and_reproducible() {
        assert_eq!(derive_seed(7, 1, 3), derive_seed(7, 1, 3));
        assert_ne!(derive_seed(7, 1, 3), derive_seed(7, 1, 4));
        assert_ne!(derive_seed(7, 1, 3), derive_seed(7, 2, 3));
        assert_ne!(derive_seed(7, 1, 3), derive_seed(8, 1, 3));
    }
}
