//! Reproducible per-chain random streams.
//!
//! Every chain owns one [`RandomStream`] keyed by `(seed, stream_index)`.
//! Streams with distinct keys are independent by construction (ChaCha stream
//! separation), and the same key always replays the same draws bit for bit,
//! so a run is reproducible regardless of scheduling order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::point::Point;

/// A seeded, indexed stream of standard normal draws.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Self {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// One standard normal scalar.
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

/// Draws a `d`-vector `Z ~ N(0, I_d)` and advances the stream.
pub fn draw_normal(stream: &mut RandomStream, d: usize) -> Point {
    assert!(d >= 1, "dimension must be at least 1");
    Point::from_vec_unchecked((0..d).map(|_| stream.normal()).collect())
}
