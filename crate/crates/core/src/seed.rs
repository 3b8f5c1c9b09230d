//! Deterministic randomness: one root seed, child streams derived by label.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// A node in the seed tree. Deriving by the same labels always yields the
/// same stream, so every randomized routine is reproducible from the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed(u64);

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Seed {
    pub fn new(root: u64) -> Self {
        Seed(splitmix(root))
    }

    pub fn derive(self, label: &str) -> Seed {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        Seed(splitmix(self.0 ^ h))
    }

    pub fn index(self, i: u64) -> Seed {
        Seed(splitmix(self.0.rotate_left(17) ^ splitmix(i)))
    }

    pub fn rng(self) -> Rng {
        Rng::seed_from_u64(self.0)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl Default for Seed {
    fn default() -> Self {
        Seed::new(0)
    }
}
