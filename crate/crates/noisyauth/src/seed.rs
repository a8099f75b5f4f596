//! Deterministic RNG derivation.
//!
//! Every random stream in a campaign is derived from (master seed, label,
//! index) by hashing, so results are independent of execution order and
//! worker count: any worker that needs the stream reconstructs it locally.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derives an independent RNG stream from the master seed, a stream label,
/// and an index within the stream family.
pub fn derive_rng(master_seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update([0u8]);
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(seed)
}
