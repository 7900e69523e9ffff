//! Deterministic random streams.
//!
//! Every random quantity derives from one 64-bit master seed. A stream is
//! identified by `(seed, label, index)`; its generator is ChaCha8 keyed with
//! `SHA-256(seed_le || label || 0x00 || index_le)`. Streams are independent of
//! the order in which they are created, so parallel trial loops reproduce the
//! serial result bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, label: &str, index: u64) -> StreamRng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Inverse-CDF draw: the first index whose cumulative weight exceeds `u`.
///
/// `weights` need not be normalised; `u` is scaled by their total. Zero-weight
/// entries are never returned.
pub fn inverse_cdf(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last_positive = i;
        if target < acc {
            return i;
        }
    }
    last_positive
}

/// One uniform draw, then [`inverse_cdf`].
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    inverse_cdf(weights, u)
}
