use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ConeSpec;
use crate::error::{Error, Result};

const MAX_ATTEMPTS: usize = 10_000;

/// Rejection sampler for interior points of a cone.
///
/// Draws `λ = c·1⃗ + r·g` with `g` standard normal, `c ∈ [0.5, 5]` and
/// `r ∈ [0, spread·c]`, keeping the draw when it lies in the cone.
pub struct ConeSampler {
    cone: ConeSpec,
    spread: f64,
    rng: ChaCha8Rng,
}

impl ConeSampler {
    pub fn new(cone: ConeSpec, seed: u64) -> Self {
        Self::with_spread(cone, 0.5, seed)
    }

    pub fn with_spread(cone: ConeSpec, spread: f64, seed: u64) -> Self {
        Self { cone, spread, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn sample(&mut self) -> Result<Vec<f64>> {
        let n = self.cone.n;
        let mut lambda = Vec::with_capacity(n);
        for _ in 0..MAX_ATTEMPTS {
            let c = self.rng.random_range(0.5..=5.0);
            let r = self.rng.random_range(0.0..=self.spread * c);
            lambda.clear();
            lambda.extend((0..n).map(|_| {
                let g: f64 = self.rng.sample(StandardNormal);
                c + r * g
            }));
            if self.cone.contains_unchecked(&lambda) {
                return Ok(lambda);
            }
        }
        Err(Error::Sampling { attempts: MAX_ATTEMPTS })
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
