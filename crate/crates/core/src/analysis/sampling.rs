//! Deterministic per-repetition random streams and ballot subsampling.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::model::{Format, VoterId};

/// Labels identifying one repetition's random stream.
#[derive(Clone, Copy, Debug)]
pub struct StreamKey<'a> {
    pub master_seed: u64,
    pub election: &'a str,
    pub format: Format,
    pub n_prime: usize,
    pub repetition: usize,
}

impl StreamKey<'_> {
    /// The stream depends only on these labels, so repetitions can run in any
    /// order or in parallel.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut h = Sha256::new();
        h.update(b"pbvote/stream/v1");
        h.update(self.master_seed.to_le_bytes());
        h.update((self.election.len() as u64).to_le_bytes());
        h.update(self.election.as_bytes());
        h.update(self.format.tag().as_bytes());
        h.update([0u8]);
        h.update((self.n_prime as u64).to_le_bytes());
        h.update((self.repetition as u64).to_le_bytes());
        ChaCha20Rng::from_seed(h.finalize().into())
    }
}

/// `n_prime` distinct members of `pool`, drawn uniformly, returned sorted.
pub fn sample_without_replacement(pool: &[usize], n_prime: usize, key: &StreamKey<'_>) -> Vec<usize> {
    assert!(n_prime <= pool.len(), "sample larger than pool");
    let mut rng = key.rng();
    let mut picked: Vec<usize> = index::sample(&mut rng, pool.len(), n_prime).into_iter().map(|i| pool[i]).collect();
    picked.sort_unstable();
    picked
}

/// Short hex digest of a sampled voter list.
pub fn sample_digest(voters: &[&VoterId]) -> String {
    let mut h = Sha256::new();
    for v in voters {
        h.update(v.as_str().as_bytes());
        h.update(b"\n");
    }
    hex::encode(&h.finalize()[..16])
}
