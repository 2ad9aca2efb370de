//! Per-run random streams.
//!
//! Each run draws from ChaCha8 keyed by the master seed (expanded with
//! `SeedableRng::seed_from_u64`) on its own 64-bit stream id, the run index.
//! Streams never overlap, so runs can execute on any thread in any order and
//! still produce the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ActionRng = ChaCha8Rng;

/// The generator for run `run_index` of the ensemble keyed by `master_seed`.
pub fn action_stream(master_seed: u64, run_index: u64) -> ActionRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(run_index);
    rng
}
