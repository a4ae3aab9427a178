//! Stable per-cell seed derivation.
//!
//! A seed is a SplitMix64 fold over the cell key: starting from
//! `h = mix(base_seed)`, each field `x` is absorbed as `h = mix(h ^ x)`, in the
//! order family, n, L, opt_level[, run]. The family enters as the 64-bit
//! FNV-1a hash of its snake_case name. Sampler sub-seeds absorb one more
//! field: [`EXPRESSIBILITY_STREAM`] or [`TRAINABILITY_STREAM`].

use crate::ansatz::AnsatzFamily;

pub const EXPRESSIBILITY_STREAM: u64 = 1;
pub const TRAINABILITY_STREAM: u64 = 2;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xCBF2_9CE4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

pub fn fold(base: u64, fields: &[u64]) -> u64 {
    fields.iter().fold(mix(base), |h, &x| mix(h ^ x))
}

/// Seed of one run of one cell.
pub fn cell_seed(base: u64, family: AnsatzFamily, n: usize, reps: usize, opt: u8, run: usize) -> u64 {
    fold(
        base,
        &[fnv1a(family.name().as_bytes()), n as u64, reps as u64, opt as u64, run as u64],
    )
}

/// Transpiler seed shared by every run of a cell.
pub fn transpile_seed(base: u64, family: AnsatzFamily, n: usize, reps: usize, opt: u8) -> u64 {
    fold(
        base,
        &[fnv1a(family.name().as_bytes()), n as u64, reps as u64, opt as u64],
    )
}

pub fn stream(seed: u64, stream: u64) -> u64 {
    mix(seed ^ stream)
}
