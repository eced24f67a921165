use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 output step for state `z`.
#[inline]
pub fn splitmix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic substream for one sample of a campaign.
///
/// The generator for `(master, index, retry)` is a Xoshiro256++ whose four
/// state words are `splitmix64(key + j * GOLDEN)` for `j = 0..4`, with
/// `key = splitmix64(splitmix64(splitmix64(master) ^ index) ^ retry)`.
/// Nothing depends on which worker draws the sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededStream {
    pub master: u64,
    pub index: u64,
    pub retry: u64,
}

impl SeededStream {
    pub fn new(master: u64, index: u64) -> Self {
        Self { master, index, retry: 0 }
    }

    /// The substream used after `retry` degenerate redraws of the same sample.
    pub fn with_retry(self, retry: u64) -> Self {
        Self { retry, ..self }
    }

    pub fn key(&self) -> u64 {
        splitmix64(splitmix64(splitmix64(self.master) ^ self.index) ^ self.retry)
    }

    pub fn rng(&self) -> Xoshiro256PlusPlus {
        let key = self.key();
        let mut seed = [0u8; 32];
        for (j, chunk) in seed.chunks_exact_mut(8).enumerate() {
            let word = splitmix64(key.wrapping_add((j as u64).wrapping_mul(GOLDEN)));
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        Xoshiro256PlusPlus::from_seed(seed)
    }
}
