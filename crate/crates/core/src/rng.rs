//! Per-trial random streams.
//!
//! Every trial draws from ChaCha8 keyed by the experiment seed (expanded with
//! `SeedableRng::seed_from_u64`) on stream `trial_index`. The block counter of
//! the cipher makes the generator counter-based, so trials are independent and
//! may be evaluated in any order or in parallel. The generator is frozen for
//! the 0.x series; changing it changes every recorded regression value.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial_index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(42, 7).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(trial_rng(42, 7).next_u64(), trial_rng(42, 8).next_u64());
        assert_ne!(trial_rng(42, 7).next_u64(), trial_rng(43, 7).next_u64());
    }
}
