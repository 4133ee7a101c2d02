//! Avalanche hashing and deterministic seed streams.
//!
//! Bernoulli symbols, μ-samples and per-worker streams all derive from the
//! same 64-bit mixer so that one master seed reproduces every run.

/// SplitMix64 / Stafford "Mix13" finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Hashes a sequence of words. Each word is absorbed and followed by a full
/// mixing round; a final round folds in the length.
pub fn hash_words(words: &[u64]) -> u64 {
    let mut state = GOLDEN;
    for &w in words {
        state = mix64(state ^ w).wrapping_add(GOLDEN);
    }
    mix64(state ^ words.len() as u64)
}

/// Maps a hash to `0..k` by multiply-shift.
#[inline]
pub fn reduce(h: u64, k: u64) -> u64 {
    ((h as u128 * k as u128) >> 64) as u64
}

/// A SplitMix64 stream. Streams for distinct `(seed, index)` pairs are
/// derived with [`SeedStream::derive`] so work can be split across workers
/// without changing the numbers any item sees.
#[derive(Clone, Debug)]
pub struct SeedStream {
    state: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream {
            state: mix64(seed ^ GOLDEN),
        }
    }

    /// Independent stream number `index` under the master `seed`.
    pub fn derive(seed: u64, index: u64) -> Self {
        SeedStream::new(hash_words(&[seed, index]))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..k` (multiply-shift, bias below `k / 2^64`).
    #[inline]
    pub fn below(&mut self, k: u64) -> u64 {
        reduce(self.next_u64(), k)
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi as i128 - lo as i128 + 1) as u64;
        lo + self.below(span) as i64
    }
}
