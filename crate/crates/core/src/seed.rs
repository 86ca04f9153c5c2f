//! Seed splitting.
//!
//! Every random stream in the crate is derived from one master seed. Trial
//! `i` of a run seeded with `master` uses `derive_seed(master, i)`: the
//! SplitMix64 finalizer applied to `master + (i + 1) · γ`, with `γ` the
//! 64-bit golden-ratio increment. This is exactly the `i`-th output of a
//! SplitMix64 generator started at `master`, so seeds for distinct trials
//! never depend on scheduling or thread count.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sub-stream `index` of `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
