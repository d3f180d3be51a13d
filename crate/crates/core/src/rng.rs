//! Seeded random streams.
//!
//! Every Monte Carlo trial gets its own ChaCha stream keyed by
//! `(master seed, trial index)`, so results do not depend on the order in
//! which trials are executed or on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Generator for the `trial`-th stream under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Factory that avoids re-running seed expansion for every trial.
#[derive(Clone, Debug)]
pub struct StreamFactory {
    base: SimRng,
}

impl StreamFactory {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn stream(&self, trial: u64) -> SimRng {
        let mut rng = self.base.clone();
        rng.set_stream(trial);
        rng.set_word_pos(0);
        rng
    }
}
