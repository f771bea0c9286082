//! Deterministic per-run seed derivation.
//!
//! Runs of a study get seeds `mix(master, run_index)` so results do not
//! depend on scheduling. The mixer is splitmix64 applied to
//! `master + index * golden-ratio`, fixed forever for reproducibility.

/// splitmix64 finalizer.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for run `index` from `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}
