//! Counter-based random streams.
//!
//! Every draw is addressed by `(seed, stream, position)` on a ChaCha8 key
//! stream, so scenario `j`, item `i` yields the same value no matter which
//! thread computes it or in what order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream tags separating the independent uses of one base seed.
pub mod tags {
    pub const INSTANCE: u64 = 0x1157;
    pub const SOLVER: u64 = 0x5017;
    pub const EVAL: u64 = 0xE7A1;
}

/// Deterministic child seed for `(base, tag, index)`.
pub fn derive_seed(base: u64, tag: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(tag);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

/// Factory for per-scenario generators under one seed.
#[derive(Clone)]
pub struct ScenarioStreams {
    root: ChaCha8Rng,
}

impl ScenarioStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            root: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Generator positioned at item 0 of scenario `j`.
    pub fn scenario(&self, j: u64) -> ChaCha8Rng {
        let mut rng = self.root.clone();
        rng.set_stream(j);
        rng
    }
}

/// Uniform draw in `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
