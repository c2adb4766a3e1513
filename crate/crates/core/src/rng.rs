//! Seedable, splittable random streams.
//!
//! A stream is identified by `(seed, stream_id)`: identical pairs reproduce
//! identical draw sequences, distinct stream ids give statistically
//! independent streams. Monte-Carlo code assigns one stream per path
//! (stream id = path index), which makes every estimate independent of the
//! worker count. ChaCha8 provides 2^64 independent streams per seed.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Fresh stream sharing this stream's seed under a different id,
    /// starting from the beginning of that id's sequence.
    pub fn substream(&self, stream_id: u64) -> Self {
        Self::new(self.seed, stream_id)
    }

    /// Uniform draw clamped into the open interval (0, 1); keeps
    /// logarithms and negative powers finite downstream.
    pub(crate) fn uniform_open01(&mut self) -> f64 {
        let u: f64 = rand::Rng::random(self);
        u.clamp(1e-12, 1.0 - 1e-12)
    }

    /// Standard exponential draw.
    pub(crate) fn exponential(&mut self) -> f64 {
        -self.uniform_open01().ln()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}
