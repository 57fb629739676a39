//! Deterministic substream derivation.
//!
//! Every random decision is driven by a ChaCha8 stream seeded from a
//! 64-bit key. Keys are derived by `mix`, a SplitMix64-style finalizer
//! applied to `(parent, label)`. The layout is fixed:
//!
//! * tree root key: `mix(seed, ROOT)`
//! * child key: `mix(parent_key, LEFT)` or `mix(parent_key, RIGHT)`
//! * candidate `i` at a node: `mix(mix(node_key, CANDIDATE), i)`
//! * ensemble member `t`: `mix(mix(seed, MEMBER), t)`; the member's bootstrap
//!   draw uses `mix(member_key, BOOTSTRAP)` and its tree uses `mix(member_key, TREE)`
//! * cross-validation run `r`: `mix(mix(seed, RUN), r)`; fold `f` inside it:
//!   `mix(mix(run_key, FOLD), f)`
//! * distribution experiment trial: `mix(mix(mix(seed, TRIAL), lambda), trial)`
//!
//! Because every stream depends only on its key, work may be evaluated in
//! any order or on any number of threads with identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub const ROOT: u64 = 0x524f_4f54;
pub const LEFT: u64 = 0x4c;
pub const RIGHT: u64 = 0x52;
pub const CANDIDATE: u64 = 0x4341_4e44;
pub const MEMBER: u64 = 0x4d45_4d42;
pub const BOOTSTRAP: u64 = 0x424f_4f54;
pub const TREE: u64 = 0x5452_4545;
pub const RUN: u64 = 0x52_554e;
pub const FOLD: u64 = 0x464f_4c44;
pub const TRIAL: u64 = 0x5452_4941;
pub const HOLDOUT: u64 = 0x484f_4c44;

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 42;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child key from a parent key and a label.
pub fn mix(parent: u64, label: u64) -> u64 {
    splitmix(parent ^ splitmix(label))
}

pub fn stream(key: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(key)
}
