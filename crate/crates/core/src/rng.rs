//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 generator keyed by the root seed and positioned
//! on the 64-bit stream index `(experiment_id << 32) | batch_id`. ChaCha is a
//! counter-mode cipher, so distinct indices never overlap and the output of a
//! stream depends only on `(root seed, experiment_id, batch_id)`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Independent random substream indexed by `(experiment_id, batch_id)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(root_seed: u64, experiment_id: u32, batch_id: u32) -> Self {
        let mut key = [0u8; 32];
        let mut state = root_seed;
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream((u64::from(experiment_id) << 32) | u64::from(batch_id));
        Self { inner }
    }

    /// Shorthand for stream `(0, 0)` of `seed`; convenient in tests.
    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0, 0)
    }

    /// Uniform draw on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        loop {
            // 53 random bits, shifted off zero.
            let u = ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
            if u < 1.0 {
                return u;
            }
        }
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
