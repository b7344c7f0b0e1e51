//! Seeded, reproducible random streams.
//!
//! A run is identified by a `u64` seed. Independent trials draw from
//! separate ChaCha streams of the same key, so results do not depend on the
//! order in which trials are evaluated.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `trial` under key `seed`.
pub fn trial_stream(seed: u64, trial: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
