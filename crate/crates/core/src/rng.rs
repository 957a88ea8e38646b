//! Deterministic random streams.
//!
//! Every consumer draws from a ChaCha8 stream identified by `(seed, stream)`.
//! A run's master seed yields stream 0 for the swap controller and stream
//! `i + 1` for replica `i`; inside a generation each population slot gets its
//! own stream keyed by a per-generation seed drawn from the replica stream.
//! Results therefore never depend on how work is scheduled across threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn controller_stream(master_seed: u64) -> StreamRng {
    stream(master_seed, 0)
}

pub fn replica_stream(master_seed: u64, replica: usize) -> StreamRng {
    stream(master_seed, replica as u64 + 1)
}

/// One independent stream per slot, keyed by a fresh draw from `parent`.
pub fn slot_streams(parent: &mut StreamRng, slots: usize) -> Vec<StreamRng> {
    let base = parent.next_u64();
    (0..slots as u64).map(|i| stream(base, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(5, 1).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x: u64 = stream(5, 1).random();
        let y: u64 = stream(5, 2).random();
        let z: u64 = stream(6, 1).random();
        assert_ne!(x, y);
        assert_ne!(x, z);
    }
}
