//! Counter-based splittable random number streams.
//!
//! Every randomized computation in this crate derives its randomness from
//! an [`RngStream`]: a 64-bit key that can be split into independent
//! substreams by index. Substream derivation is a pure hash of
//! `(key, index)`, so a parallel estimator can hand trial `t` the stream
//! `root.substream(t)` from any worker thread and obtain the same draws a
//! sequential run would. Per-pair fading gains use the same mechanism
//! keyed on `(fade_seed, tag, i, j)`, which makes edge evaluation
//! order-free and avoids storing O(n²) gains.

use rand::RngCore;

/// SplitMix64 finalizer; bijective, well-mixed in both directions.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const SPLIT_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const SUBSTREAM_SALT: u64 = 0xd1b5_4a32_d192_ed03;

/// A splittable stream identified by a 64-bit key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    key: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { key: seed }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Derive the `index`-th child stream. Children of distinct
    /// `(key, index)` pairs collide with probability ~2⁻⁶⁴.
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream {
            key: mix64(self.key ^ mix64(index.wrapping_add(SUBSTREAM_SALT))),
        }
    }

    /// Sequential generator seeded from this stream's key.
    pub fn rng(&self) -> StreamRng {
        StreamRng {
            state: mix64(self.key ^ SPLIT_GAMMA),
        }
    }
}

/// SplitMix64 sequence generator. Period 2⁶⁴, passes standard statistical
/// batteries; entirely adequate for Monte Carlo sampling.
#[derive(Debug, Clone)]
pub struct StreamRng {
    state: u64,
}

impl StreamRng {
    /// Uniform draw in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unit-mean exponential via inverse CDF.
    #[inline]
    pub fn next_exp(&mut self) -> f64 {
        -(-self.next_f64()).ln_1p()
    }
}

impl RngCore for StreamRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(SPLIT_GAMMA);
        mix64(self.state)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        let mut chunks = dest.chunks_exact_mut(8);
        for chunk in &mut chunks {
            chunk.copy_from_slice(&self.next_u64().to_le_bytes());
        }
        let rem = chunks.into_remainder();
        if !rem.is_empty() {
            let bytes = self.next_u64().to_le_bytes();
            rem.copy_from_slice(&bytes[..rem.len()]);
        }
    }
}

/// Tags separating the per-pair fade domains.
pub const FADE_TAG_LEGIT: u64 = 0x4c45_4749_545f_4c4c;
pub const FADE_TAG_EAVES: u64 = 0x4541_5645_535f_4c45;

/// Stream for the ordered pair `(i, j)` under `tag`, keyed on `fade_seed`.
/// A pure function of its arguments: lazy, order-independent, reproducible.
pub fn pair_stream(fade_seed: u64, tag: u64, i: u32, j: u32) -> RngStream {
    let packed = ((i as u64) << 32) | j as u64;
    RngStream::new(fade_seed).substream(tag).substream(packed)
}

/// Unit-mean exponential power gain for the ordered pair `(i, j)`.
pub fn pair_gain_exp(fade_seed: u64, tag: u64, i: u32, j: u32) -> f64 {
    pair_stream(fade_seed, tag, i, j).rng().next_exp()
}

/// Exponential power gain truncated to [0, kappa] by resampling, which
/// preserves a proper density on the bounded support.
pub fn pair_gain_bounded(fade_seed: u64, tag: u64, i: u32, j: u32, kappa: f64) -> f64 {
    let mut rng = pair_stream(fade_seed, tag, i, j).rng();
    loop {
        let g = rng.next_exp();
        if g <= kappa {
            return g;
        }
    }
}
