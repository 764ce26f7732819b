//! Seeded deterministic random streams.
//!
//! One master seed drives the whole simulation. Child streams are derived
//! from (role, index, index) tags so that work parallelized across parties
//! or partitions draws from independent streams regardless of scheduling
//! order. Same seed, same tags: bit-identical draws across runs.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// A seeded ChaCha20 stream plus the key it was derived from.
#[derive(Debug, Clone)]
pub struct RngHandle {
    key: [u64; 4],
    stream: ChaCha20Rng,
}

impl RngHandle {
    pub fn new(seed: u64) -> Self {
        Self::from_key([seed, 0, 0, 0])
    }

    fn from_key(key: [u64; 4]) -> Self {
        let mut seed = [0u8; 32];
        for (chunk, word) in seed.chunks_exact_mut(8).zip(key.iter()) {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        Self {
            key,
            stream: ChaCha20Rng::from_seed(seed),
        }
    }

    /// Derive an independent child stream. Distinct (parent, tag) pairs map
    /// to distinct ChaCha keys via a splitmix64 chain.
    pub fn derive(&self, tag: [u64; 3]) -> Self {
        let mut state = 0x243F_6A88_85A3_08D3u64; // mixing constant, arbitrary
        for word in self.key.iter().chain(tag.iter()) {
            state ^= splitmix64(state.wrapping_add(*word));
        }
        let mut key = [0u64; 4];
        for slot in key.iter_mut() {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            *slot = splitmix64(state);
        }
        Self::from_key(key)
    }

    /// Next raw 64-bit draw.
    pub fn next_u64(&mut self) -> u64 {
        self.stream.next_u64()
    }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.stream.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, slice: &mut [T]) {
        use rand::seq::SliceRandom;
        slice.shuffle(&mut self.stream);
    }
}

impl RngCore for RngHandle {
    fn next_u32(&mut self) -> u32 {
        self.stream.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.stream.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.stream.fill_bytes(dest)
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
