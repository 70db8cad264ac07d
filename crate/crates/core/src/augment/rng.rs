use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Source of the random choices made by the augmentation generators.
pub trait RandomSource {
    /// Uniform integer in `lo..=hi`.
    fn int_in(&mut self, lo: usize, hi: usize) -> usize;
    /// Uniform real in `[lo, hi]`.
    fn real_in(&mut self, lo: f64, hi: f64) -> f64;
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-image seed: a 64-bit mix of the global seed and the FNV-1a hash of the id.
pub fn image_seed(global_seed: u64, id: &str) -> u64 {
    splitmix64(global_seed ^ splitmix64(fnv1a64(id.as_bytes())))
}

/// ChaCha8 stream seeded per image, so results do not depend on processing order.
#[derive(Debug, Clone)]
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn for_image(global_seed: u64, id: &str) -> Self {
        Self::new(image_seed(global_seed, id))
    }
}

impl RandomSource for SeededRng {
    fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        self.0.gen_range(lo..=hi)
    }

    fn real_in(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            lo
        } else {
            self.0.gen_range(lo..=hi)
        }
    }
}
