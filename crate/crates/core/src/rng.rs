//! Seed handling. Every random decision in the crate draws from a ChaCha
//! stream derived from one 64-bit seed plus a name and index, so independent
//! tasks (trees, folds, one-vs-rest problems) get independent streams no
//! matter in which order they run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeedSource {
    seed: u64,
}

impl SeedSource {
    pub fn new(seed: u64) -> Self {
        SeedSource { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for the task `name` number `index`.
    pub fn stream(&self, name: &str, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(splitmix64(fnv1a(name) ^ splitmix64(index)));
        rng
    }

    /// A child source, for handing a seed to a sub-computation that derives
    /// its own streams.
    pub fn child(&self, name: &str, index: u64) -> SeedSource {
        SeedSource {
            seed: splitmix64(self.seed ^ fnv1a(name).rotate_left(17) ^ splitmix64(index)),
        }
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
