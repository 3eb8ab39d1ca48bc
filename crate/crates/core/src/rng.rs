//! Seed derivation and the deterministic generator used by every stochastic stream.
//!
//! Each stream (a link, a sensor, the defect generator, ...) gets its own
//! generator whose seed is a stable hash of the master seed and the stream
//! name. Adding a stream therefore never perturbs the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type SimRng = ChaCha8Rng;

/// Stable 64-bit seed for `stream` under `master`.
pub fn derive_seed(master: u64, stream: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(stream.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn stream_rng(master: u64, stream: &str) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, stream))
}

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Master seed of run `index` in a sweep; run 0 keeps the scenario's own seed.
pub fn run_seed(master: u64, index: u32) -> u64 {
    if index == 0 {
        master
    } else {
        derive_seed(master, &alloc::format!("run:{index}"))
    }
}
