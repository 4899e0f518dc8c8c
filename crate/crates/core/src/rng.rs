//! Seeded, named random streams.
//!
//! Every game and every estimator run draws from its own ChaCha stream whose
//! key is derived from a base seed plus a label, so runs stay reproducible
//! no matter how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

/// Derives a child seed from `base` and an ordered list of labels.
pub fn derive_seed(base: u64, parts: &[&[u8]]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(b"semivalue/seed/v1");
    hasher.update(base.to_le_bytes());
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}

/// An independent generator for the stream named `name` under `seed`.
pub fn stream(seed: u64, name: &str) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, &[name.as_bytes()]))
}
