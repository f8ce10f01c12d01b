//! Seeded detection sampling.
//!
//! Every random stream is ChaCha20 (`rand_chacha` 0.3) keyed by the 64-bit
//! seed in little-endian order in key bytes 0..8 (the remaining key bytes
//! are zero), with the stream id selecting independent sub-sequences.
//! Uniform variates take the top 53 bits of one `next_u64`, so each draw
//! consumes exactly two 32-bit words of keystream.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::pattern::IntensityPattern;

/// Algorithm tag echoed in reports.
pub const RNG_ALGORITHM: &str =
    "ChaCha20 (rand_chacha 0.3; key = seed u64 LE in bytes 0..8; uniform = (next_u64 >> 11) * 2^-53)";

/// ChaCha20 generator for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Uniform double in `[0, 1)`.
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-CDF sampler over a pattern. The cumulative distribution is the
/// running sum of bin masses, linear inside each bin.
#[derive(Debug, Clone)]
pub struct DetectionSampler {
    left_edge: f64,
    dx: f64,
    intensity: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DetectionSampler {
    pub fn new(pattern: &IntensityPattern) -> Result<Self> {
        let screen = pattern.screen();
        let intensity = pattern.intensity().to_vec();
        let mut cumulative = Vec::with_capacity(intensity.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for &v in &intensity {
            acc += v;
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::invalid("cannot sample from a pattern with zero mass"));
        }
        Ok(Self {
            left_edge: screen.x_min() - 0.5 * screen.dx(),
            dx: screen.dx(),
            intensity,
            cumulative,
        })
    }

    /// Position for a uniform variate `u ∈ [0, 1)`.
    pub fn position(&self, u: f64) -> f64 {
        let total = *self.cumulative.last().unwrap_or(&0.0);
        let target = u * total;
        // first bin whose upper cumulative exceeds the target; zero-mass
        // bins are never selected
        let bin = self.cumulative[1..]
            .partition_point(|&c| c <= target)
            .min(self.intensity.len() - 1);
        let within = if self.intensity[bin] > 0.0 {
            ((target - self.cumulative[bin]) / self.intensity[bin]).clamp(0.0, 1.0)
        } else {
            0.5
        };
        self.left_edge + (bin as f64 + within) * self.dx
    }

    pub fn sample<R: RngCore>(&self, rng: &mut R) -> f64 {
        self.position(uniform(rng))
    }
}

/// `n` independent detections drawn from `pattern` (stream 0 of `seed`).
pub fn sample_detections(pattern: &IntensityPattern, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("detection count must be at least 1"));
    }
    let sampler = DetectionSampler::new(pattern)?;
    let mut rng = rng_for(seed, 0);
    Ok((0..n).map(|_| sampler.sample(&mut rng)).collect())
}
