//! Deterministic random streams keyed by a master seed and string labels.
//!
//! Every stochastic step in the crate draws from a stream derived here, so
//! results depend only on `(seed, labels)` and never on processing order or
//! worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Stream = ChaCha8Rng;

/// Derives an independent stream from `seed` and an ordered list of labels.
///
/// Labels are length-prefixed before hashing, so `["ab", "c"]` and
/// `["a", "bc"]` give different streams.
pub fn derive_stream(seed: u64, labels: &[&[u8]]) -> Stream {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for label in labels {
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label);
    }
    let digest: [u8; 32] = hasher.finalize().into();
    ChaCha8Rng::from_seed(digest)
}

pub fn sample_stream(seed: u64, domain: &str, sample_id: &str) -> Stream {
    derive_stream(seed, &[domain.as_bytes(), sample_id.as_bytes()])
}
